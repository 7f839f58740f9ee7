"""Build script: compiles the optional simplex kernel extension.

The package is pure Python by default; if Cython and a C compiler are
available the hot feasibility kernel is also built as an extension
module.  A failed extension build must never fail the install, so the
whole attempt is wrapped and the pure kernel remains the fallback.
"""

import os

from setuptools import Extension, setup

ext_modules = []
try:
    if not os.path.exists("src/hornsafe/lra/_simplex_cy.pyx"):
        raise ImportError
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "hornsafe.lra._simplex_cy",
                ["src/hornsafe/lra/_simplex_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
