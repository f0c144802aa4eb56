"""Build script.  The compiled evaluation kernel is optional: when Cython
and a C compiler are available the extension is built, otherwise the
package installs with the pure-Python kernel selected at import time."""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "nullgauge._kernel_cy",
                sources=["src/nullgauge/_kernel_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
    for ext in ext_modules:
        ext.optional = True
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
