import os
import sys

# Run against the build tree when the package is not installed: CMake sets
# FRAPIDENT_MODULE_DIR to the directory holding the compiled extension and
# FRAPIDENT_SOURCE_DIR to the repository root (for python/frapident).
_module_dir = os.environ.get("FRAPIDENT_MODULE_DIR")
if _module_dir:
    sys.path.insert(0, _module_dir)
_source_dir = os.environ.get("FRAPIDENT_SOURCE_DIR")
if _source_dir:
    sys.path.insert(0, os.path.join(_source_dir, "python"))
