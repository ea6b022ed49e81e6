"""mtlimits: exact and Monte Carlo analysis of multitask-learning limits on
two-point task families.

Modules:

* ``discrete``  - finite distributions, TV/KL, testing bounds, binomial backbone
* ``bounds``    - closed-form concentration inequalities
* ``scenarios`` - multitask distribution families and their parameters
* ``learners``  - ERM, pooling, oracle-subset ERM, Bernstein-ball intersection
* ``exact``     - exact error probabilities, mixture KL, rate formulas
* ``mc``        - seeded Monte Carlo engine (numba kernels, numpy fallback)
* ``cli``       - the ``mtlimits`` command-line experiment runner
"""

__version__ = "0.1.0"

from . import bounds, discrete, exact, learners, mc, scenarios  # noqa: F401
