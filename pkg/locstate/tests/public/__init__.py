import os

PUBLIC_DIR = os.path.dirname(__file__)
