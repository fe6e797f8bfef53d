"""Build script for the compiled covering-scan kernel.

The package works without the extension (a pure-Python kernel is selected
at import time), but the compiled kernel is what makes dataset-scale
calibration fast. Float expressions in the .pyx mirror the pure kernel
operation-for-operation; -ffp-contract=off keeps the compiler from fusing
them into FMAs, so both backends are bit-identical.
"""

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "ordinalcps._scan",
        ["src/ordinalcps/_scan.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
