"""Classical ladder operators, polynomial Poisson algebras and the 2D
superintegrable systems they generate.

The package is organised in layers:

* :mod:`ladderlab.phase`      phase-space states and a numerical Poisson bracket
* :mod:`ladderlab.potentials` potential families (closed forms and continuation)
* :mod:`ladderlab.ladder`     ladder-operator pairs and product polynomials
* :mod:`ladderlab.verify`     residual suites certifying a family
* :mod:`ladderlab.superint`   resonant 2D compositions and their integrals
* :mod:`ladderlab.dynamics`   integration, conservation and closure detection
* :mod:`ladderlab.cli`        command-line surface
"""

from .errors import LadderLabError
from .phase import Observable, PhaseState, poisson_bracket
from .potentials import (
    PotentialBranch,
    RootSet,
    SymmetricInvariants,
    branch_continuation,
    closed_form_v3,
    closed_form_v4,
    double_root_set,
    gravel_potential,
    triple_root_set,
)
from .ladder import (
    LadderOperator,
    LadderPair,
    PhaPolynomials,
    build_ladder1,
    build_ladder3,
    build_ladder4,
    hamiltonian_observable,
    pha_polynomials,
)
from .verify import VerificationReport, verify_family
from .superint import AxisSystem, Hamiltonian2D, IntegralSet, compose
from .dynamics import Trajectory, algebraic_trajectory, closure_detect, integrate

__version__ = "0.1.0"
