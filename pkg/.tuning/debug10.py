import numpy as np
import debris_spectra as ds
from debris_spectra.forest import fixed_feature_sets, FeatureSet
from debris_spectra.spectra import SpectralSignature, SignatureLibrary, ABSORPTION_DIPS


def build_library(p):
    grid = np.arange(440.0, 2251.0, 5.0)
    dips = np.zeros_like(grid)
    for c, s, dep in ABSORPTION_DIPS:
        dips += dep * np.exp(-((grid - c) ** 2) / (2 * s * s))
    sigs = {}
    for name, base in p['baselines'].items():
        level = np.full_like(grid, base)
        peak = 0.0
        if name == p.get('structured'):
            roll = 1.0 / (1.0 + np.exp(-(grid - 1150.0) / 130.0))
            level = base - (base - 0.03) * roll
            peak = p['peak'] * np.exp(-(((grid - 810.0) / 55.0) ** 2))
        sigs[name] = SpectralSignature(name, 'polymer', grid, np.round(level * (1 - dips) + peak, 6))
    water = (0.018 + p['tilt'] / (1.0 + np.exp(-(grid - 1700.0) / 150.0))
             + 0.055 * np.exp(-(((grid - 468.0) / 26.0) ** 2)))
    sigs['water'] = SpectralSignature('water', 'water', grid, np.round(water, 6))
    sand = (0.22 + 0.10 / (1 + np.exp(-(grid - p['sand_edge']) / p['sand_w']))
            + p['far'] / (1 + np.exp(-(grid - 2000.0) / 120.0)))
    sigs['sand'] = SpectralSignature('sand', 'sand', grid, np.round(sand, 6))
    return SignatureLibrary(sigs)


p = dict(structured='LDPE', peak=0.1, tilt=0.008, sand_edge=590.0, sand_w=25.0, far=0.03,
         baselines={'PET': 0.05, 'PA66': 0.14, 'PA6': 0.23, 'PP': 0.32, 'uNAPO': 0.24,
                    'LDPE': 0.34, 'PVC': 0.42})
lib = build_library(p)
stacks = [ds.build_scene(s) for s in ds.default_campaign(lib, seed=0)]
d, _ = ds.clean(ds.add_indices(ds.campaign_dataset(stacks, 'bilinear')))
sets = dict(fixed_feature_sets())
sets['D'] = FeatureSet('D', ('Blue', 'NDWI', 'SR', 'FDI'))
for sid in ('C', 'A', 'B', 'D'):
    for k in (3, 4, 5):
        fset = sets[sid]
        X = d.feature_matrix(fset.features)
        m = ds.kmeans_fit(X, k, seed=0, feature_set=sid)
        rep = ds.compose_report(m, d, fset)
        fl = ds.trend_checks([rep], d)
        print(f'=== {sid} k={k} share={fl.two_cluster_share:.3f} low={fl.low_coverage_absorbed:.3f} '
              f'PET={fl.polymer_affinity.get("PET")} PVC={fl.polymer_affinity.get("PVC")} '
              f'merged_ok={fl.water_sand_never_merged}', flush=True)
        for c in rep.clusters:
            print(f'   c{c.index}: n={c.size} W={c.by_class.get("Water",0)} S={c.by_class.get("Sand",0)} '
                  f'P={c.by_class.get("Plastic",0)} PVC={c.by_polymer.get("PVC",0)} '
                  f'LDPE={c.by_polymer.get("LDPE",0)} cov={c.by_coverage}', flush=True)
