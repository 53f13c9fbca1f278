import logging

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def set_verbosity(verbose: bool = False, quiet: bool = False):
    if verbose:
        logger.setLevel(logging.DEBUG)
    elif quiet:
        logger.setLevel(logging.WARNING)
    else:
        logger.setLevel(logging.INFO)
