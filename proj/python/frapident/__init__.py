"""FRAP transport-model simulation and identifiability analysis.

Thin wrapper over the compiled _frapident module. When the package has not
been installed, the extension is picked up from FRAPIDENT_MODULE_DIR (set by
the CMake test harness) so the smoke tests can run from a build tree.
"""

import os
import sys

try:
    from ._frapident import *  # noqa: F401,F403
    from ._frapident import __doc__ as _doc
except ImportError:
    _module_dir = os.environ.get("FRAPIDENT_MODULE_DIR")
    if _module_dir and _module_dir not in sys.path:
        sys.path.insert(0, _module_dir)
    from _frapident import *  # noqa: F401,F403
    from _frapident import __doc__ as _doc

__doc__ = _doc
__version__ = "1.0.0"
