"""
Numerical defaults shared by every roughlog sub-package.

The values can be changed permanently in the user's ``roughlog.cfg`` (see
`astropy.config`) or temporarily with ``conf.set_temp``::

    >>> from roughlog import conf
    >>> with conf.set_temp('dense_cap', 400):
    ...     conf.dense_cap
    400
"""
import os

from astropy import config as _config

__all__ = ['Conf', 'conf', 'max_workers']


class Conf(_config.ConfigNamespace):
    """
    Configuration parameters for `roughlog`.
    """
    dense_cap = _config.ConfigItem(
        900, "Largest operator size for which dense matrices (exponentials, "
        "full eigensolves, entrywise comparisons) are formed.", cfgtype='integer')
    eig_rtol = _config.ConfigItem(
        1e-12, "Relative eigenvalue change at which inverse iteration stops.", cfgtype='float')
    eig_residual_tol = _config.ConfigItem(
        1e-10, "Eigen-residual tolerance, relative to max(1, |lambda1|).", cfgtype='float')
    eig_max_iter = _config.ConfigItem(
        10000, "Maximum number of inverse iteration steps.", cfgtype='integer')
    resolvent_rtol = _config.ConfigItem(
        1e-10, "Relative residual accepted from a resolvent solve.", cfgtype='float')
    gap_tol = _config.ConfigItem(
        1e-8, "Spectral gaps at or below this value are reported as near-degenerate.",
        cfgtype='float')
    lstar_divergence = _config.ConfigItem(
        0.5, "Increment of lambda1 per gamma step above which the threshold is "
        "declared infinite.", cfgtype='float')
    lstar_tol = _config.ConfigItem(
        1e-8, "Relative increment below which the threshold sweep counts as converged.",
        cfgtype='float')
    monotone_slack = _config.ConfigItem(
        1e-12, "Relative slack for componentwise monotonicity and ordering checks.",
        cfgtype='float')
    residual_rtol = _config.ConfigItem(
        1e-10, "Componentwise residual tolerance for sub- and supersolutions, relative "
        "to the size of the terms that make up the residual.", cfgtype='float')
    fixed_point_tol = _config.ConfigItem(
        1e-10, "Stopping tolerance of the monotone fixed point iteration.", cfgtype='float')
    fixed_point_max_iter = _config.ConfigItem(
        200000, "Maximum number of monotone fixed point steps.", cfgtype='integer')
    agreement_tol = _config.ConfigItem(
        1e-8, "Agreement required between the iterations from above and below.",
        cfgtype='float')
    search_cap_log2 = _config.ConfigItem(
        60, "Doubling and halving searches stop at 2**search_cap_log2.", cfgtype='integer')
    safety_factor = _config.ConfigItem(
        0.9, "Factor applied to the largest admissible subsolution scale.", cfgtype='float')
    envelope_samples = _config.ConfigItem(
        1024, "Number of samples of the nonlinearity used to choose the shift omega.",
        cfgtype='integer')
    max_threads = _config.ConfigItem(
        0, "Worker threads for parallel sweeps; 0 means one per CPU. "
        "The ROUGHLOG_THREADS environment variable takes precedence.", cfgtype='integer')
    log_level = _config.ConfigItem(
        'INFO', "Threshold for the roughlog logger.",
        cfgtype="option('DEBUG', 'INFO', 'WARNING', 'ERROR')")


conf = Conf()


def max_workers():
    """
    Number of worker threads to use for parallel maps.

    ``ROUGHLOG_THREADS`` overrides ``conf.max_threads``; both fall back on the CPU count.
    """
    env = os.environ.get('ROUGHLOG_THREADS')
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"ROUGHLOG_THREADS must be an integer, got {env!r}")
        if value >= 1:
            return value
    if conf.max_threads >= 1:
        return conf.max_threads
    return os.cpu_count() or 1
