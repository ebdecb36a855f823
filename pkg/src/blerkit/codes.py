"""Parity-check codes: alist parsing, GF(2) systematic encoding, syndromes.

The code object carries an explicit edge list (check, variable) with stable
global indices (sorted by check, then variable) plus the padded per-check /
per-variable index tables the vectorized decoder needs.
"""

import importlib.resources

import numpy as np


class AlistError(ValueError):
    """Raised for malformed or inconsistent alist input."""


class LdpcCode:
    """Immutable parity-check code with precomputed decoder topology.

    Attributes
    ----------
    n, m : code length and number of checks
    k : code dimension, n - rank(H) over GF(2)
    H : dense uint8 parity-check matrix (m, n)
    edge_check, edge_var : (E,) arrays, edge e connects check/variable
    info_positions : (k,) systematic bit positions (free columns of H)
    """

    def __init__(self, H):
        H = np.asarray(H, dtype=np.uint8) & 1
        self.H = H
        self.m, self.n = H.shape
        checks, vars_ = np.nonzero(H)
        order = np.lexsort((vars_, checks))
        self.edge_check = checks[order].astype(np.int64)
        self.edge_var = vars_[order].astype(np.int64)
        self.num_edges = len(self.edge_check)
        self._build_systematic()
        self._build_topology()

    # -- GF(2) linear algebra -------------------------------------------------

    def _build_systematic(self):
        R = self.H.copy()
        n = self.n
        pivots = []
        row = 0
        for col in range(n):
            sub = np.nonzero(R[row:, col])[0]
            if len(sub) == 0:
                continue
            pr = row + sub[0]
            if pr != row:
                R[[row, pr]] = R[[pr, row]]
            others = np.nonzero(R[:, col])[0]
            others = others[others != row]
            R[others] ^= R[row]
            pivots.append(col)
            row += 1
            if row == R.shape[0]:
                break
        self.rank = len(pivots)
        self.k = n - self.rank
        pivots = np.array(pivots, dtype=np.int64)
        free = np.setdiff1d(np.arange(n), pivots)
        self.info_positions = free
        self._parity_positions = pivots
        # x[pivot_i] = sum_f R[i, f] * x_f  (mod 2), from the reduced rows
        self._parity_from_info = R[: self.rank][:, free]

    def encode(self, bits):
        """Systematic encode of (..., k) information bits to (..., n) codewords."""
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.shape[-1] != self.k:
            raise ValueError("expected %d information bits, got %d" % (self.k, bits.shape[-1]))
        cw = np.zeros(bits.shape[:-1] + (self.n,), dtype=np.uint8)
        cw[..., self.info_positions] = bits
        parity = (bits @ self._parity_from_info.T) & 1
        cw[..., self._parity_positions] = parity
        return cw

    def syndrome(self, bits):
        """H @ bits over GF(2); zero iff `bits` is a codeword."""
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.shape[-1] != self.n:
            raise ValueError("expected length %d, got %d" % (self.n, bits.shape[-1]))
        return (bits @ self.H.T) & 1

    # -- decoder topology -----------------------------------------------------

    def _build_topology(self):
        m, n, E = self.m, self.n, self.num_edges
        check_deg = np.bincount(self.edge_check, minlength=m)
        var_deg = np.bincount(self.edge_var, minlength=n)
        self.check_degrees = check_deg
        self.var_degrees = var_deg
        dc = check_deg.max() if m else 0
        dv = var_deg.max() if n else 0
        # padded edge-index tables; -1 marks padding
        ce = np.full((m, dc), -1, dtype=np.int64)
        pos = np.zeros(m, dtype=np.int64)
        for e in range(E):
            c = self.edge_check[e]
            ce[c, pos[c]] = e
            pos[c] += 1
        ve = np.full((n, dv), -1, dtype=np.int64)
        pos = np.zeros(n, dtype=np.int64)
        for e in range(E):
            v = self.edge_var[e]
            ve[v, pos[v]] = e
            pos[v] += 1
        self.check_edges = ce
        self.var_edges = ve
        self.check_mask = ce >= 0
        self.var_mask = ve >= 0


def parse_alist(text):
    """Parse alist text (standard MacKay layout) into an LdpcCode."""
    lines = text.splitlines()
    tokens = []
    for ln, line in enumerate(lines, start=1):
        stripped = line.split("#")[0].strip()
        if stripped:
            tokens.append((ln, stripped.split()))
    if not tokens:
        raise AlistError("empty alist input")

    def take(expect=None, what=""):
        if not tokens:
            raise AlistError("unexpected end of alist while reading %s" % what)
        ln, vals = tokens.pop(0)
        try:
            vals = [int(v) for v in vals]
        except ValueError:
            raise AlistError("line %d: non-integer token while reading %s" % (ln, what))
        if expect is not None and len(vals) != expect:
            raise AlistError("line %d: expected %d values for %s, got %d" % (ln, expect, what, len(vals)))
        return ln, vals

    _, header = take(2, "header (n m)")
    n, m = header
    if n <= 0 or m <= 0:
        raise AlistError("header must have positive n and m")
    take(2, "max degrees")
    _, var_deg = take(n, "variable degree list")
    _, chk_deg = take(m, "check degree list")

    H = np.zeros((m, n), dtype=np.uint8)
    for v in range(n):
        ln, entries = take(None, "adjacency of variable %d" % (v + 1))
        entries = [c for c in entries if c != 0]
        if len(entries) != var_deg[v]:
            raise AlistError("line %d: variable %d lists %d checks, degree says %d"
                             % (ln, v + 1, len(entries), var_deg[v]))
        for c in entries:
            if not 1 <= c <= m:
                raise AlistError("line %d: check index %d out of range for variable %d" % (ln, c, v + 1))
            if H[c - 1, v]:
                raise AlistError("line %d: duplicate edge (check %d, variable %d)" % (ln, c, v + 1))
            H[c - 1, v] = 1
    for c in range(m):
        ln, entries = take(None, "adjacency of check %d" % (c + 1))
        entries = [v for v in entries if v != 0]
        if len(entries) != chk_deg[c]:
            raise AlistError("line %d: check %d lists %d variables, degree says %d"
                             % (ln, c + 1, len(entries), chk_deg[c]))
        for v in entries:
            if not 1 <= v <= n:
                raise AlistError("line %d: variable index %d out of range for check %d" % (ln, v, c + 1))
            if not H[c, v - 1]:
                raise AlistError("line %d: check %d lists variable %d absent from the variable view"
                                 % (ln, c + 1, v))
    if int(H.sum()) != sum(chk_deg):
        raise AlistError("adjacency views disagree on the number of edges")
    return LdpcCode(H)


def load_alist(path):
    """Load an alist file from disk."""
    with open(path) as fh:
        return parse_alist(fh.read())


def write_alist(H, path):
    """Write a dense binary matrix as a standard alist file."""
    H = np.asarray(H, dtype=np.uint8)
    m, n = H.shape
    var_adj = [list(np.nonzero(H[:, v])[0] + 1) for v in range(n)]
    chk_adj = [list(np.nonzero(H[c, :])[0] + 1) for c in range(m)]
    dv = max(len(a) for a in var_adj)
    dc = max(len(a) for a in chk_adj)
    with open(path, "w") as fh:
        fh.write("%d %d\n%d %d\n" % (n, m, dv, dc))
        fh.write(" ".join(str(len(a)) for a in var_adj) + "\n")
        fh.write(" ".join(str(len(a)) for a in chk_adj) + "\n")
        for a in var_adj:
            fh.write(" ".join(str(x) for x in a + [0] * (dv - len(a))) + "\n")
        for a in chk_adj:
            fh.write(" ".join(str(x) for x in a + [0] * (dc - len(a))) + "\n")


def bundled_code(name):
    """Load one of the shipped test codes: "hamming_7_4" or "ldpc_96_48"."""
    ref = importlib.resources.files("blerkit") / "codes_data" / (name + ".alist")
    return parse_alist(ref.read_text())


def bundled_code_path(name):
    """Filesystem path of a bundled alist (for configs referencing files)."""
    return str(importlib.resources.files("blerkit") / "codes_data" / (name + ".alist"))
