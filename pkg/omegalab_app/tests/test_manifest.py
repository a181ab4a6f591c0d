from django.conf import settings
from django.test import SimpleTestCase

# ==========================================================================
# TESTS – requirements.txt
# Solo dependencias de ejecución: Django, DRF, decouple, numpy y scipy.
# ==========================================================================

RUNTIME_PACKAGES = {
    'asgiref', 'django', 'djangorestframework', 'numpy', 'python-decouple', 'scipy', 'sqlparse', 'tzdata',
}


def pinned_packages():
    with open(settings.BASE_DIR / 'requirements.txt', encoding='utf-8') as handle:
        lines = [line.strip() for line in handle if line.strip() and not line.startswith('#')]
    return {line.split('==')[0].lower(): line.split('==')[1] for line in lines}


class RequirementsTests(SimpleTestCase):

    def test_only_runtime_packages(self):
        self.assertEqual(set(pinned_packages()), RUNTIME_PACKAGES)

    def test_every_package_is_pinned(self):
        for name, version in pinned_packages().items():
            self.assertTrue(version, name)
