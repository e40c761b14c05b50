import os
import sys

# ctest points QSEMI_BUILD_TREE at the CMake-built package; an editable pip
# install would otherwise shadow it through its import hook.
_root = os.environ.get("QSEMI_BUILD_TREE")
if _root:
    sys.meta_path[:] = [f for f in sys.meta_path if type(f).__name__ != "ScikitBuildRedirectingFinder"]
    sys.path.insert(0, _root)
