"""Build script for the optional compiled arithmetic core.

The package is fully functional without the extension; tcekit.exactnum
falls back to the pure Python implementation when the import fails.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "tcekit.exactnum._speedups",
                ["src/tcekit/exactnum/_speedups.pyx"],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
