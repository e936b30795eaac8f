"""Build the optional compiled kink-counting kernel.

The package works without it (a numpy fallback is selected at import time),
so the extension is marked optional: a missing compiler degrades gracefully
instead of failing the install.
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
                "kinkscope._kernels._fast",
                ["src/kinkscope/_kernels/_fast.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
