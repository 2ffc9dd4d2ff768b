"""Build script: compiles the optional Cython kernel.

The package works without the extension (a pure-Python fallback is selected
at import time), so a failed compile downgrades to a warning instead of
aborting the install.
"""

import warnings

from setuptools import Extension, setup
from setuptools.errors import CCompilerError, PlatformError


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("Cython unavailable; installing with pure-Python kernels only")
        return []
    return cythonize(
        [Extension("twolane.kernels._fast", ["src/twolane/kernels/_fast.pyx"])],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


try:
    setup(ext_modules=extensions())
except (CCompilerError, PlatformError) as exc:
    warnings.warn(f"kernel extension build failed ({exc}); falling back to pure Python")
    setup(ext_modules=[])
