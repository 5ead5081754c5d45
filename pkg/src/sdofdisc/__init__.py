"""Discrete-time SDOF oscillator toolkit."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0"

from .core import *  # noqa: E402,F401,F403
from .core import __all__ as _core_all  # noqa: E402
from .methods import *  # noqa: E402,F401,F403
from .methods import __all__ as _methods_all  # noqa: E402
from .signals import *  # noqa: E402,F401,F403
from .signals import __all__ as _signals_all  # noqa: E402
from .spectrum import *  # noqa: E402,F401,F403
from .spectrum import __all__ as _spectrum_all  # noqa: E402
from .ss_methods import *  # noqa: E402,F401,F403
from .ss_methods import __all__ as _ss_all  # noqa: E402
from .stability import *  # noqa: E402,F401,F403
from .stability import __all__ as _stability_all  # noqa: E402
from .steppers import *  # noqa: E402,F401,F403
from .steppers import __all__ as _steppers_all  # noqa: E402
from .tf_methods import *  # noqa: E402,F401,F403
from .tf_methods import __all__ as _tf_all  # noqa: E402

__all__ = ["__version__", *_core_all, *_tf_all, *_ss_all, *_steppers_all, *_methods_all,
           *_stability_all, *_signals_all, *_spectrum_all]
