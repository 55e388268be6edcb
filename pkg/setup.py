"""Build script. The compiled Monte Carlo kernel is optional: if Cython is
unavailable the package installs anyway and falls back to the pure-Python
kernel at import time."""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "smps._kmc_cy",
                ["src/smps/_kmc_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
