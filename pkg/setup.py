import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# The compiled kernels are optional: without them the package falls back to
# the pure-numpy implementations in fieldplace._kernels_py.
ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "fieldplace._kernels_cy",
                ["src/fieldplace/_kernels_cy.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
