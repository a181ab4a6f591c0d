from decouple import config

# --------------------------------------------------------------------------
# Parámetros numéricos de OmegaLab
# --------------------------------------------------------------------------
# Cada clave se puede sobrescribir con la variable de entorno OMEGALAB_<CLAVE>
# (o en el archivo .env). Ninguna es obligatoria.
OMEGALAB = {
    'GRID_POINTS': config('OMEGALAB_GRID_POINTS', default=1024, cast=int),              # Puntos de la grilla sobre el círculo
    'REFINE_TOL': config('OMEGALAB_REFINE_TOL', default=1e-10, cast=float),             # Tolerancia relativa del certificado
    'MAX_REFINE_ITERS': config('OMEGALAB_MAX_REFINE_ITERS', default=200, cast=int),     # Evaluaciones extra tras la grilla
    'VERIFY_GRID_POINTS': config('OMEGALAB_VERIFY_GRID_POINTS', default=256, cast=int), # Grilla usada por la verificación
    'VERIFY_TRIALS': config('OMEGALAB_VERIFY_TRIALS', default=200, cast=int),           # Ensayos por forma
    'VERIFY_TOL': config('OMEGALAB_VERIFY_TOL', default=1e-8, cast=float),
    'TRIAL_WORKERS': config('OMEGALAB_TRIAL_WORKERS', default=0, cast=int),             # Procesos para ensayos; 0 = uno por núcleo
    'JACOBI_MAX_SWEEPS': config('OMEGALAB_JACOBI_MAX_SWEEPS', default=30, cast=int),
}
