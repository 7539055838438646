import os
import platform

from setuptools import Extension, setup

ext_modules = []
compile_args = ["-O3"]
if platform.machine().lower() in ("x86_64", "amd64"):
    # hardware popcount; every x86-64 CPU from the last fifteen years has it
    compile_args.append("-mpopcnt")
if os.environ.get("POPRE_NO_EXTENSION", "") in ("", "0"):
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "popre._kernels._core",
                    ["src/popre/_kernels/_core.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=compile_args,
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
