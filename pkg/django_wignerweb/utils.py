import hashlib
import logging

logger = logging.getLogger(__name__)


def is_power_of_two(value):
    return isinstance(value, int) and value > 0 and not value & (value - 1)


def next_power_of_two(value, minimum=64):
    """
    smallest power of two which is >= ``value`` and >= ``minimum``
    """
    n = minimum
    while n < value:
        n *= 2
    return n


def file_checksum(path, chunk_size=1 << 20):
    """
    returns the md5 hex digest of a file
    (same digest used for configuration checksums)
    """
    digest = hashlib.md5()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(chunk_size), b''):
            digest.update(chunk)
    return digest.hexdigest()


def chi_deviation(chi, target):
    """
    relative deviation of ``chi`` from ``target``
    """
    return abs(chi - target) / target
