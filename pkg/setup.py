from setuptools import setup, find_packages

setup(
    name='qnglab',
    version='0.1.0',
    packages=find_packages(exclude=['tests', 'tests.*']),
    include_package_data=True,
    package_data={
        'qnglab_cli': ['config.default.yaml'],
    },
    install_requires=[
        'Click',
        'PyYAML',
        'numpy',  # dense complex linear algebra
        'scipy',  # Cholesky solves and log-sum-exp
    ],
    extras_require={
        'tests': [
            'pytest',
            'pytest-mock',
        ],
    },
    entry_points={
        'console_scripts': [
            'qnglab = qnglab_cli.cli:qnglab',
        ],
    },
    description='Generalized quantum natural gradient with Petz-function quantum Fisher metrics.',
    long_description=open('README.md', encoding='utf-8').read(),
    long_description_content_type='text/markdown',
    classifiers=[
        'Programming Language :: Python :: 3',
        'Environment :: Console',
        'Topic :: Scientific/Engineering :: Physics',
    ],
    python_requires='>=3.8',
)
