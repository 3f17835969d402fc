"""Configure Django settings so pytest can run the Django test cases."""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'project.settings')
django.setup()
