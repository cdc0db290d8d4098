VERSION = (0, 1, 0, 'alpha', 1)
__version__ = VERSION  # alias


def get_version():
    """
    PEP 440 style version string, e.g. ``0.1a1`` or ``1.2.3``
    """
    major, minor, micro, release = VERSION[:4]
    version = '{0}.{1}'.format(major, minor)
    if micro:
        version = '{0}.{1}'.format(version, micro)
    if release != 'final':
        serial = VERSION[4] if len(VERSION) > 4 else 0
        version = '{0}{1}{2}'.format(version, release[0], serial)
    return version
