#!/usr/bin/env python3
"""Regenerates data/measurements/*.csv and data/fit_cases.kv.

The original drag and fuel measurements are not available as data files. These
datasets are reconstructions: each table2.kv curve is sampled over the gap
range of the corresponding experiment and rounded to 4 decimals. Truck sets
are fuel-reduction ratios produced by the forward fuel model (hdt_mcauliffe
at 100 km/h). The forward model here is written independently of the C++
library.
"""
import math
import pathlib

HERE = pathlib.Path(__file__).resolve().parent
RHO, G = 1.2256, 9.8066


def records(path, kind):
    out, cur = [], None
    for line in (HERE / path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        if line.startswith('['):
            cur = {} if line == '[%s]' % kind else None
            if cur is not None:
                out.append(cur)
            continue
        if cur is not None:
            k, v = (s.strip() for s in line.split('=', 1))
            cur[k] = v
    return out


MODELS = {m['id']: m for m in records('table2.kv', 'drag_model')}
VEHICLES = {v['name']: v for v in records('vehicles.kv', 'vehicle')}


def ratio(mid, gap):
    m = MODELS[mid]
    a, b, c = float(m['a']), float(m['b']), float(m['c'])
    if m['g_o_m'] == '-':
        lo, hi = 1e-3, 1e3
        f = lambda x: a * x ** b + c - 1.0
        for _ in range(200):
            mid_ = 0.5 * (lo + hi)
            if (f(mid_) < 0) == (f(lo) < 0):
                lo = mid_
            else:
                hi = mid_
        go = 0.5 * (lo + hi)
    else:
        go = float(m['g_o_m'])
    if gap >= go:
        return 1.0
    return min(a * gap ** b + c, 1.0)


def fuel(v, cd, speed):
    f = lambda k: float(v[k])
    m = f('mass_kg') + float(v.get('payload_kg', 0))
    r = RHO / 25.92 * cd * f('frontal_area_m2') * speed ** 2 \
        + G * m * f('rolling_cr') / 1000 * (f('rolling_c1') * speed + f('rolling_c2'))
    p = r / (3600 * f('driveline_efficiency')) * speed
    return f('alpha0') + f('alpha1') * p + f('alpha2') * p * p if p >= 0 else f('alpha0')


def grid(lo, hi, n):
    return [round(lo + (hi - lo) * i / (n - 1), 3) for i in range(n)]


def log_grid(lo, hi, n):
    return [round(lo * (hi / lo) ** (i / (n - 1)), 3) for i in range(n)]


LDV_L, BUS_L = 4.952, 12.0
# id: (gaps, kind, source)
SETS = {}
for mid in ('ldv2_lead', 'ldv2_trail'):
    SETS[mid] = (grid(0.5 * LDV_L, 3 * LDV_L, 10), 'drag', 'reconstructed from table2 %s; wind-tunnel range 0.5-3 vehicle lengths' % mid)
for mid in ('ldv3_lead', 'ldv3_middle', 'ldv3_trail'):
    SETS[mid] = (grid(0.5 * LDV_L, 2 * LDV_L, 8), 'drag', 'reconstructed from table2 %s; wind-tunnel range 0.5-2 vehicle lengths' % mid)
for mid in ('bus2_lead', 'bus2_trail', 'bus3_lead', 'bus3_middle', 'bus3_trail'):
    SETS[mid] = (log_grid(0.25 * BUS_L, 5 * BUS_L, 12), 'drag', 'reconstructed from table2 %s; wind-tunnel range up to 5 bus lengths' % mid)
for mid in ('hdt2_lead', 'hdt2_trail'):
    SETS[mid] = (grid(3, 10, 8), 'fuel', 'reconstructed from table2 %s via fuel model; road-test range 3-10 m' % mid)
for mid in ('hdt3_lead', 'hdt3_middle', 'hdt3_trail'):
    SETS[mid] = (grid(5, 45, 9), 'fuel', 'reconstructed from table2 %s via fuel model; road-test range up to 2 truck lengths' % mid)

BOUNDS = {'hdt2_trail': (250, 320), 'hdt3_trail': (400, 480)}
SPEED = 100.0


def main():
    out_dir = HERE / 'measurements'
    out_dir.mkdir(exist_ok=True)
    truck = VEHICLES['hdt_mcauliffe']
    cd_inf = float(truck['cd_infinity'])
    f_inf = fuel(truck, cd_inf, SPEED)
    cases = ['# Fit cases over the reconstructed measurement sets.',
             '# Generated by reconstruct_measurements.py.', '']
    for mid, (gaps, kind, source) in SETS.items():
        lines = []
        if kind == 'drag':
            lines.append('gap_m,ratio,source')
            for g in gaps:
                lines.append('%s,%.4f,%s' % (g, ratio(mid, g), source))
        else:
            lines.append('gap_m,fuel_ratio,speed_kmh,source')
            for g in gaps:
                delta = (f_inf - fuel(truck, cd_inf * ratio(mid, g), SPEED)) / f_inf
                lines.append('%s,%.4f,%s,%s' % (g, delta + 0.0, SPEED, source))
        (out_dir / ('%s.csv' % mid)).write_text('\n'.join(lines) + '\n')
        m = MODELS[mid]
        case = ['[fit_case]', 'id = ' + mid, 'data = measurements/%s.csv' % mid,
                'position = ' + m['position'], 'platoon_size = ' + m['platoon_size']]
        if kind == 'fuel':
            case.append('vehicle = hdt_mcauliffe')
        if mid in BOUNDS:
            case += ['go_lower = %s' % BOUNDS[mid][0], 'go_upper = %s' % BOUNDS[mid][1]]
        cases += case + ['']
    (HERE / 'fit_cases.kv').write_text('\n'.join(cases))


if __name__ == '__main__':
    main()
