class RolecastError(Exception):
    """Base class for every error raised by this package.

    The CLI catches this to turn module failures into a machine-readable
    stderr record and a nonzero exit code.
    """
