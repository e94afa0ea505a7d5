"""Build script for the optional compiled kernels.

The package is fully functional without the extension; ``tdbackscatter.kernels``
falls back to the numpy implementations when the compiled module is missing,
so the extension is marked optional and a failed compile does not fail the
install.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "tdbackscatter.kernels._speedups",
                ["src/tdbackscatter/kernels/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
