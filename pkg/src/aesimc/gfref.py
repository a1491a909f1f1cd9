"""Golden AES-128 encryption reference and GF(2^8) arithmetic toolkit.

Pure-Python, bit-exact implementation used as the correctness oracle for
the in-memory-computing simulator. State follows the standard column-major
convention: byte k of a 128-bit block lands at row k % 4, column k // 4.
"""

# Reduction modulus x^8 + x^4 + x^3 + x + 1
AES_POLY = 0x11B

N_ROUNDS = 10
BLOCK_BYTES = 16


def xtime(a):
    """Multiply by 2 in GF(2^8): left shift, reduce by 0x11B on overflow."""
    a <<= 1
    if a & 0x100:
        a ^= AES_POLY
    return a


def mul3(a):
    """Multiply by 3 in GF(2^8): 3*a = 2*a XOR a."""
    return xtime(a) ^ a


def gf_mul(a, b):
    """Carry-less product of a and b reduced mod x^8+x^4+x^3+x+1."""
    result = 0
    while b:
        if b & 1:
            result ^= a
        a = xtime(a)
        b >>= 1
    return result


def gf_inverse(a):
    """Multiplicative inverse in GF(2^8); inverse(0) is defined as 0.

    Computed as a^254 by square-and-multiply (a^255 = 1 for a != 0).
    """
    if a == 0:
        return 0
    result = 1
    power = a
    exponent = 254
    while exponent:
        if exponent & 1:
            result = gf_mul(result, power)
        power = gf_mul(power, power)
        exponent >>= 1
    return result


def _affine(a):
    # b'_i = b_i ^ b_{i+4} ^ b_{i+5} ^ b_{i+6} ^ b_{i+7} ^ c_i, c = 0x63
    out = 0
    for i in range(8):
        bit = (
            (a >> i)
            ^ (a >> ((i + 4) % 8))
            ^ (a >> ((i + 5) % 8))
            ^ (a >> ((i + 6) % 8))
            ^ (a >> ((i + 7) % 8))
            ^ (0x63 >> i)
        ) & 1
        out |= bit << i
    return out


def sbox_computed(a):
    """S-box from first principles: GF inverse then the affine transform."""
    return _affine(gf_inverse(a))


SBOX = tuple(sbox_computed(x) for x in range(256))


def sbox_lut(a):
    """S-box by table lookup; identical to sbox_computed by construction."""
    return SBOX[a]


def state_from_block(block):
    """Load 16 bytes into a 4x4 state matrix, column-major."""
    if len(block) != BLOCK_BYTES:
        raise ValueError("block must be 16 bytes, got %d" % len(block))
    return [[block[4 * c + r] for c in range(4)] for r in range(4)]


def block_from_state(state):
    """Inverse of state_from_block."""
    return bytes(state[r][c] for c in range(4) for r in range(4))


def sub_bytes(state):
    return [[SBOX[b] for b in row] for row in state]


def shift_rows(state):
    """Rotate row i left by i byte positions; row 0 is unchanged."""
    return [row[i:] + row[:i] for i, row in enumerate(state)]


def mix_columns(state):
    out = [[0] * 4 for _ in range(4)]
    for j in range(4):
        col = [state[r][j] for r in range(4)]
        for r in range(4):
            out[r][j] = (
                xtime(col[r])
                ^ mul3(col[(r + 1) % 4])
                ^ col[(r + 2) % 4]
                ^ col[(r + 3) % 4]
            )
    return out


def add_round_key(state, round_key):
    """XOR a 16-byte round key (column-major order) into the state."""
    return [
        [state[r][c] ^ round_key[4 * c + r] for c in range(4)]
        for r in range(4)
    ]


def expand_key(key):
    """AES-128 key expansion: 44 32-bit words W_0..W_43."""
    if len(key) != 16:
        raise ValueError("key must be 16 bytes, got %d" % len(key))
    words = [int.from_bytes(key[4 * i:4 * i + 4], "big") for i in range(4)]
    rcon = 0x01
    for i in range(4, 44):
        t = words[i - 1]
        if i % 4 == 0:
            t = ((t << 8) | (t >> 24)) & 0xFFFFFFFF  # RotWord
            t = int.from_bytes(
                bytes(SBOX[b] for b in t.to_bytes(4, "big")), "big"
            )  # SubWord
            t ^= rcon << 24
            rcon = xtime(rcon)
        words.append(words[i - 4] ^ t)
    return words


def round_key_bytes(words, round_index):
    """Round key for round_index (0..10) as 16 bytes, column-major."""
    return b"".join(
        words[4 * round_index + c].to_bytes(4, "big") for c in range(4)
    )


def encrypt_block(plaintext, key):
    """Standard AES-128 encryption of one 16-byte block."""
    words = expand_key(key)
    state = state_from_block(plaintext)
    state = add_round_key(state, round_key_bytes(words, 0))
    for rnd in range(1, N_ROUNDS + 1):
        state = sub_bytes(state)
        state = shift_rows(state)
        if rnd < N_ROUNDS:
            state = mix_columns(state)
        state = add_round_key(state, round_key_bytes(words, rnd))
    return block_from_state(state)
