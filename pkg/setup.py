from setuptools import find_packages, setup

setup(
    name="gdofkit",
    version="0.1.0",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    install_requires=[
        "hydra-core>=1.3.0",
        "omegaconf>=2.3.0",
        "pydantic>=2.0",
        "numpy>=1.24",
        "pandas>=2.0",
        "tqdm>=4.65",
        "docopt>=0.6.2",
    ],
    package_data={
        "gdofkit": ["conf/**/*.yaml"],
    },
    include_package_data=True,
    entry_points={
        "console_scripts": ["gdofkit=gdofkit.cli:main"],
    },
    python_requires=">=3.10",
    author="James",
    description="Exact GDoF regions and layered superposition schemes for MISO broadcast channels with finite precision CSIT",
)
