import sys, time
import numpy as np
import debris_spectra as ds
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
    sand = (0.22 + 0.10 / (1 + np.exp(-(grid - p['sand_edge']) / 25.0))
            + 0.08 / (1 + np.exp(-(grid - 2000.0) / 120.0)))
    sigs['sand'] = SpectralSignature('sand', 'sand', grid, np.round(sand, 6))
    return SignatureLibrary(sigs)


def evaluate(lib, kseed, verbose=False):
    from debris_spectra.forest import fixed_feature_sets, FeatureSet
    stacks = [ds.build_scene(s) for s in ds.default_campaign(lib, seed=0)]
    d, _ = ds.clean(ds.add_indices(ds.campaign_dataset(stacks, 'bilinear')))
    sets = dict(fixed_feature_sets())
    sets['D'] = FeatureSet('D', ('Blue', 'NDWI', 'SR', 'FDI'))
    worst = dict(share=1.0, low=1.0, merged=True, pet=0, pvc=0)
    for sid in ('A', 'B', 'C', 'D'):
        fset = sets[sid]
        X = d.feature_matrix(fset.features)
        for k in (3, 4, 5):
            m = ds.kmeans_fit(X, k, seed=kseed, feature_set=sid)
            fl = ds.trend_checks([ds.compose_report(m, d, fset)], d)
            worst['share'] = min(worst['share'], fl.two_cluster_share)
            worst['low'] = min(worst['low'], fl.low_coverage_absorbed)
            worst['merged'] &= fl.water_sand_never_merged
            worst['pet'] += (fl.polymer_affinity.get('PET') != 'water')
            worst['pvc'] += (fl.polymer_affinity.get('PVC') != 'sand')
            if verbose and (fl.low_coverage_absorbed < 0.8 or not fl.water_sand_never_merged
                            or fl.polymer_affinity.get('PET') != 'water'
                            or fl.polymer_affinity.get('PVC') != 'sand'):
                print(f'    {sid} k={k}: share={fl.two_cluster_share:.3f} low={fl.low_coverage_absorbed:.3f} '
                      f'merged={fl.water_sand_never_merged} PET={fl.polymer_affinity.get("PET")} '
                      f'PVC={fl.polymer_affinity.get("PVC")}', flush=True)
    ok = (worst['share'] >= 0.90 and worst['low'] >= 0.8 and worst['merged']
          and worst['pet'] == 0 and worst['pvc'] == 0)
    return ok, worst


t0 = time.time()
variants = [
    dict(name='wide+LDPE32', structured='LDPE', peak=0.07, tilt=0.01, sand_edge=590.0,
         baselines={'PET': 0.04, 'PA66': 0.11, 'PA6': 0.18, 'PP': 0.25, 'uNAPO': 0.28,
                    'LDPE': 0.32, 'PVC': 0.50}),
    dict(name='wide+LDPE32+pvc45', structured='LDPE', peak=0.07, tilt=0.01, sand_edge=590.0,
         baselines={'PET': 0.04, 'PA66': 0.11, 'PA6': 0.18, 'PP': 0.25, 'uNAPO': 0.28,
                    'LDPE': 0.32, 'PVC': 0.45}),
    dict(name='flatworld', structured=None, peak=0.0, tilt=0.01, sand_edge=590.0,
         baselines={'PET': 0.04, 'PA66': 0.11, 'PA6': 0.18, 'PP': 0.25, 'uNAPO': 0.30,
                    'LDPE': 0.21, 'PVC': 0.50}),
]
for p in variants:
    lib = build_library(p)
    for kseed in (0, 7, 42, 77):
        ok, worst = evaluate(lib, kseed, verbose=True)
        tag = 'OK ' if ok else '   '
        print(f"{tag}{p['name']} seed={kseed} share={worst['share']:.3f} low={worst['low']:.3f} "
              f"merged={worst['merged']} petbad={worst['pet']} pvcbad={worst['pvc']} "
              f"[{time.time()-t0:.0f}s]", flush=True)
