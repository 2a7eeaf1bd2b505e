"""Hash constants shared by both kernel backends. Changing any of these
invalidates the published labeling test vectors."""

# splitmix64 finaliser multipliers
M1 = 0xBF58476D1CE4E5B9
M2 = 0x94D049BB133111EB
GOLDEN = 0x9E3779B97F4A7C15
# path-key chain root and seed salt
ROOT = 0x6A09E667F3BCC909
SEED_SALT = 0xBB67AE8584CAA73B

MASK64 = (1 << 64) - 1


def mix64_int(z):
    """splitmix64 finaliser on a Python int (scalar path, no numpy overflow warnings)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * M1) & MASK64
    z = ((z ^ (z >> 27)) * M2) & MASK64
    return z ^ (z >> 31)


def seed_key(seed):
    return mix64_int((seed & MASK64) ^ SEED_SALT)
