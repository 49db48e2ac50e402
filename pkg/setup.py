import os

from setuptools import setup

ext_modules = []
if os.environ.get("ACSX_PURE_PYTHON") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("acsx._scan_kernel", ["src/acsx/_scan_kernel.pyx"])],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )
    except ImportError:
        # No Cython available: the package still works through the pure
        # Python kernel selected at import time.
        ext_modules = []

setup(ext_modules=ext_modules)
