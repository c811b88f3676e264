"""Build script: compiles the optional spatial-hash extension.

The package works without the extension (a pure-Python fallback is
selected at import time), so a missing compiler or Cython only costs
speed, never functionality.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("mesochat._hash_core", ["src/mesochat/_hash_core.pyx"])],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
