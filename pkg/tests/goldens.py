"""Closed-form Rindler-basis coefficients of the vacua, excitations and pair state."""

import math

from fermiorder.rindler_states import dirac_ket


def grassmann_vacuum_golden(r):
    c, s = math.cos(r), math.sin(r)
    return {0b0000: c * c, 0b0011: -s * c, 0b1100: s * c, 0b1111: -s * s}


def grassmann_excitation_golden(r, qr, ql):
    c, s = math.cos(r), math.sin(r)
    return {0b1000: qr * c, 0b1011: -qr * s, 0b1101: ql * s, 0b0001: ql * c}


def dirac_vacuum_golden(r):
    c, s = math.cos(r), math.sin(r)
    g = {
        "0000": c**4, "00↑↓": -(c**3) * s, "00↓↑": -(c**3) * s, "00pp": c * c * s * s,
        "↑↓00": c**3 * s, "↓↑00": c**3 * s,
        "↑↓↑↓": -s * s * c * c, "↑↓↓↑": -s * s * c * c, "↓↑↑↓": -s * s * c * c, "↓↑↓↑": -s * s * c * c,
        "↑↓pp": c * s**3, "↓↑pp": c * s**3, "pppp": s**4,
        "pp↑↓": -c * s**3, "pp↓↑": -c * s**3, "pp00": c * c * s * s,
    }
    return {int(dirac_ket(k), 2): v for k, v in g.items()}


def dirac_excitation_golden(r, qr, ql, sym):
    c, s = math.cos(r), math.sin(r)
    sg = 1 if sym == "↑" else -1
    g = {
        "000" + sym: ql * c**3,
        "↑↓0" + sym: ql * c * c * s,
        "↓↑0" + sym: ql * c * c * s,
        "pp0" + sym: ql * c * s * s,
        "00" + sym + "p": ql * sg * c * c * s,
        "↑↓" + sym + "p": ql * sg * c * s * s,
        "↓↑" + sym + "p": ql * sg * c * s * s,
        "pp" + sym + "p": ql * sg * s**3,
        sym + "000": qr * c**3,
        sym + "0↑↓": -qr * c * c * s,
        sym + "0↓↑": -qr * c * c * s,
        sym + "0pp": qr * c * s * s,
        "p" + sym + "00": qr * sg * c * c * s,
        "p" + sym + "pp": qr * sg * s**3,
        "p" + sym + "↑↓": -qr * sg * c * s * s,
        "p" + sym + "↓↑": -qr * sg * c * s * s,
    }
    return {int(dirac_ket(k), 2): v for k, v in g.items()}


def dirac_pair_golden(r, qr, ql):
    c, s = math.cos(r), math.sin(r)
    g = {
        "p000": qr * qr * c * c, "p0↑↓": -qr * qr * s * c, "p0↓↑": -qr * qr * s * c, "p0pp": qr * qr * s * s,
        "000p": ql * ql * c * c, "↑↓0p": ql * ql * s * c, "↓↑0p": ql * ql * s * c, "pp0p": ql * ql * s * s,
        "↑00↓": qr * ql * c * c, "↑0↓p": -qr * ql * c * s, "p↑0↓": qr * ql * s * c, "p↑↓p": -qr * ql * s * s,
        "↓00↑": -qr * ql * c * c, "↓0↑p": -qr * ql * c * s, "p↓0↑": qr * ql * s * c, "p↓↑p": qr * ql * s * s,
    }
    return {int(dirac_ket(k), 2): v for k, v in g.items()}
