"""
The roughlog logger.

This follows the astropy/SunPy pattern of a package logger built on
`astropy.logger.AstropyLogger` so that it shares astropy's formatting.
"""
import logging

from astropy.logger import AstropyLogger

from roughlog.config import conf

__all__ = ['RoughlogLogger', 'log']


class RoughlogLogger(AstropyLogger):
    """
    An `~astropy.logger.AstropyLogger` whose level comes from ``roughlog.conf.log_level``.
    """

    def _set_defaults(self):
        super()._set_defaults()
        self.setLevel(conf.log_level)


def _init_log():
    """
    Initialize the roughlog logger.

    The logger class is swapped only for the duration of the ``getLogger`` call
    so that other packages are unaffected.
    """
    orig_logger_cls = logging.getLoggerClass()
    logging.setLoggerClass(RoughlogLogger)
    try:
        log = logging.getLogger('roughlog')
        log._set_defaults()
    finally:
        logging.setLoggerClass(orig_logger_cls)

    return log


log = _init_log()
