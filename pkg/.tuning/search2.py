import time
import numpy as np
import debris_spectra as ds
from debris_spectra.spectra import SpectralSignature, SignatureLibrary, ABSORPTION_DIPS


def build_library(params):
    grid = np.arange(440.0, 2251.0, 5.0)
    dips = np.zeros_like(grid)
    for c, s, dep in ABSORPTION_DIPS:
        dips += dep * np.exp(-((grid - c) ** 2) / (2 * s * s))
    sigs = {}
    for name, base in params['baselines'].items():
        level = np.full_like(grid, base)
        peak = 0.0
        if name == 'LDPE':
            roll = 1.0 / (1.0 + np.exp(-(grid - 1150.0) / 130.0))
            level = base - (base - 0.03) * roll
            peak = 0.07 * np.exp(-(((grid - 810.0) / 55.0) ** 2))
        sigs[name] = SpectralSignature(name, 'polymer', grid, np.round(level * (1 - dips) + peak, 6))
    water = (0.018 + params['tilt'] / (1.0 + np.exp(-(grid - 1700.0) / 150.0))
             + 0.055 * np.exp(-(((grid - 468.0) / 26.0) ** 2)))
    sigs['water'] = SpectralSignature('water', 'water', grid, np.round(water, 6))
    sand = (0.22 + 0.10 / (1 + np.exp(-(grid - params['sand_edge']) / params['sand_width']))
            + 0.08 / (1 + np.exp(-(grid - 2000.0) / 120.0)))
    sigs['sand'] = SpectralSignature('sand', 'sand', grid, np.round(sand, 6))
    return SignatureLibrary(sigs)


def evaluate(lib, kseed):
    from debris_spectra.forest import fixed_feature_sets, FeatureSet
    stacks = [ds.build_scene(s) for s in ds.default_campaign(lib, seed=0)]
    d, _ = ds.clean(ds.add_indices(ds.campaign_dataset(stacks, 'bilinear')))
    sets = dict(fixed_feature_sets())
    sets['D'] = FeatureSet('D', ('Blue', 'NDWI', 'SR', 'FDI'))
    worst = dict(share=1.0, low=1.0, merged=True, pet=0, pvc=0)
    details = []
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
            details.append((sid, k, round(fl.two_cluster_share, 3), round(fl.low_coverage_absorbed, 3),
                            fl.water_sand_never_merged, fl.polymer_affinity.get('PET'),
                            fl.polymer_affinity.get('PVC')))
    ok = (worst['share'] >= 0.90 and worst['low'] >= 0.8 and worst['merged']
          and worst['pet'] == 0 and worst['pvc'] == 0)
    return ok, worst, details


t0 = time.time()
for tilt in (0.0, 0.01):
    for pvc in (0.45, 0.50):
        for darks in ((0.04, 0.08, 0.12, 0.16), (0.04, 0.09, 0.14, 0.19)):
            p = dict(tilt=tilt, sand_edge=590.0, sand_width=25.0,
                     baselines={'PET': darks[0], 'PA66': darks[1], 'PA6': darks[2],
                                'PP': darks[3], 'uNAPO': 0.22, 'LDPE': 0.30, 'PVC': pvc})
            lib = build_library(p)
            for kseed in (0, 77):
                ok, worst, details = evaluate(lib, kseed)
                tag = 'OK ' if ok else '   '
                print(f"{tag}tilt={tilt} pvc={pvc} darks={darks} seed={kseed} "
                      f"share={worst['share']:.3f} low={worst['low']:.3f} merged={worst['merged']} "
                      f"petbad={worst['pet']} pvcbad={worst['pvc']} [{time.time()-t0:.0f}s]", flush=True)
                if not ok:
                    for row in details:
                        if row[3] < 0.8 or not row[4] or row[5] != 'water' or row[6] != 'sand':
                            print('      ', row, flush=True)
