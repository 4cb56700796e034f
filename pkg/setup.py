from setuptools import setup, find_packages

version = {}
with open("latentfair/version.py") as fp:
    exec(fp.read(), version)

setup(
    name="latentfair",
    version=version["__version__"],
    description="Subgroup debiasing of diagnostic classifiers by latent-space "
                "traversal of a style-based generator",
    long_description=open("pypi-readme.rst").read(),
    license="MIT",
    keywords="fairness gan latent traversal data augmentation metrics",
    packages=find_packages(exclude=["docs", "tests"]),
    include_package_data=True,
    install_requires=[
        "numpy",
        "pandas>=0.22",
        "scipy",
        "scikit-learn",
        "python-box",
        "proglog",
        "flametree",
        "fuzzywuzzy",
    ],
    entry_points={"console_scripts": ["latentfair = latentfair.pipeline.cli:main"]},
)
