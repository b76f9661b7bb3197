#!/usr/bin/env python3
"""Expand the CIE 1924 photopic luminous efficiency function from its 5 nm
tabulation (380-780 nm) to 1 nm with Sprague interpolation and emit the C++
table consumed by core/src/photopic_table.cpp."""

import sys

V5 = [
    0.000039, 0.000064, 0.00012, 0.000217, 0.000396, 0.00064, 0.00121,
    0.00218, 0.004, 0.0073, 0.0116, 0.01684, 0.023, 0.0298, 0.038, 0.048,
    0.06, 0.0739, 0.09098, 0.1126, 0.13902, 0.1693, 0.20802, 0.2586, 0.323,
    0.4073, 0.503, 0.6082, 0.71, 0.7932, 0.862, 0.91485, 0.954, 0.9803,
    0.99495, 1.0, 0.995, 0.9786, 0.952, 0.9154, 0.87, 0.8163, 0.757, 0.6949,
    0.631, 0.5668, 0.503, 0.4412, 0.381, 0.321, 0.265, 0.217, 0.175, 0.1382,
    0.107, 0.0816, 0.061, 0.04458, 0.032, 0.0232, 0.017, 0.01192, 0.00821,
    0.005723, 0.004102, 0.002929, 0.002091, 0.001484, 0.001047, 0.00074,
    0.00052, 0.000361, 0.000249, 0.000172, 0.00012, 0.0000848, 0.00006,
    0.0000424, 0.00003, 0.0000212, 0.000015,
]


def sprague(p, sub=5):
    head = [
        (884 * p[0] - 1960 * p[1] + 3033 * p[2] - 2648 * p[3] + 1080 * p[4] - 180 * p[5]) / 209,
        (508 * p[0] - 540 * p[1] + 488 * p[2] - 367 * p[3] + 144 * p[4] - 24 * p[5]) / 209,
    ]
    q = p[::-1]
    tail = [
        (508 * q[0] - 540 * q[1] + 488 * q[2] - 367 * q[3] + 144 * q[4] - 24 * q[5]) / 209,
        (884 * q[0] - 1960 * q[1] + 3033 * q[2] - 2648 * q[3] + 1080 * q[4] - 180 * q[5]) / 209,
    ]
    e = head + list(p) + tail
    out = []
    for i in range(2, len(e) - 3):
        a0 = e[i]
        a1 = (2 * e[i - 2] - 16 * e[i - 1] + 16 * e[i + 1] - 2 * e[i + 2]) / 24
        a2 = (-e[i - 2] + 16 * e[i - 1] - 30 * e[i] + 16 * e[i + 1] - e[i + 2]) / 24
        a3 = (-9 * e[i - 2] + 39 * e[i - 1] - 70 * e[i] + 66 * e[i + 1] - 33 * e[i + 2] + 7 * e[i + 3]) / 24
        a4 = (13 * e[i - 2] - 64 * e[i - 1] + 126 * e[i] - 124 * e[i + 1] + 61 * e[i + 2] - 12 * e[i + 3]) / 24
        a5 = (-5 * e[i - 2] + 25 * e[i - 1] - 50 * e[i] + 50 * e[i + 1] - 25 * e[i + 2] + 5 * e[i + 3]) / 24
        for k in range(sub):
            x = k / sub
            out.append(a0 + x * (a1 + x * (a2 + x * (a3 + x * (a4 + x * a5)))))
    out.append(p[-1])
    return [max(0.0, v) for v in out]


def main():
    v1 = sprague(V5)
    assert len(v1) == 401
    lines = [
        "// Generated by tools/gen_photopic_table.py. Do not edit.",
        "#include \"photopic_table.hpp\"",
        "",
        "namespace camsim::detail {",
        "",
        "const std::array<double, kPhotopicCount> kPhotopic1nm = {",
    ]
    for i in range(0, len(v1), 6):
        lines.append("    " + ", ".join(f"{v:.9g}" for v in v1[i:i + 6]) + ",")
    lines += ["};", "", "}  // namespace camsim::detail", ""]
    sys.stdout.write("\n".join(lines))


if __name__ == "__main__":
    main()
