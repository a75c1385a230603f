from setuptools import setup, find_packages

setup(
    name="polyforge",
    version="1.0.0",
    description="Finitely presented groups, coset enumeration and chiral {4,8} polytope certification",
    packages=find_packages(),
    install_requires=[
        "rich>=13.0.0",
        "pytest",
        "diskcache",
        "numpy>=1.21",
        "sympy>=1.9",
    ],
    entry_points={
        "console_scripts": [
            "polyforge = PolyForge.main:entry_point",
        ]
    },
    python_requires=">=3.8"
)
