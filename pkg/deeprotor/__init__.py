from __future__ import annotations

import sys

from deeprotor.exceptions import ErrorCode

# must run before any module using 3.9+ syntax is imported
if (sys.version_info.major, sys.version_info.minor) < (3, 9):
    print("deeprotor requires Python 3.9 or newer")
    sys.exit(ErrorCode.UNSUPPORTED_PYTHON_VERSION_ERROR.value)
