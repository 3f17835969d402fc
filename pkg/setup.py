from setuptools import setup, find_packages

setup(
    name='silhouette-match',
    version='1.0.0',
    description='Point cloud reconstruction from multi-view silhouettes by 2D projection matching',
    packages=find_packages(exclude=['examples', 'examples.*']),
    py_modules=['manage'],
    include_package_data=True,
    python_requires='>=3.9',
    install_requires=[
        'django',
        'numpy',
        'pandas',
        'python-dotenv',
    ],
    entry_points={
        'console_scripts': [
            'silhouette-match=manage:main',
        ],
    },
)
