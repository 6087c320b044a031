from setuptools import setup, find_packages

setup(
    name="cosymcr",
    version="0.1.0",
    description="Symbolic-numeric verification of almost cosymplectic, (κ, μ, ν) and CR structure identities.",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    install_requires=[
        "numpy",
        "pandas",
        "pyarrow",
    ],
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.8",
    entry_points={
        "console_scripts": [
            "cosymcr = cosymcr.cli.main:main"
        ]
    },
)
