"""Build script: compiles the optional Cython solver kernel.

The package works without the extension (a NumPy fallback implements the
same algorithm); compilation failures are non-fatal.
"""

import sys

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize
    import numpy as np

    ext_modules = cythonize(
        [
            Extension(
                "fiberforce._kernels_cy",
                ["src/fiberforce/_kernels_cy.pyx"],
                include_dirs=[np.get_include()],
                # -ffp-contract=off keeps the compiled kernel bitwise
                # identical to the NumPy fallback (no FMA re-association).
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"fiberforce: skipping Cython extension build ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
