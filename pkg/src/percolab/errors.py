class CapExceeded(RuntimeError):
    """A requested computation exceeds a configured enumeration or memory cap."""
