"""Build script for the optional compiled witness kernel.

The package is fully functional without the extension: ``qracsim._kernels``
falls back to the pure-Python implementation when the compiled module is
missing or fails to build.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "qracsim._kernels._witness_cy",
                ["src/qracsim/_kernels/_witness_cy.pyx"],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
