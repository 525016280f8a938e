import numpy as np
import debris_spectra as ds
from debris_spectra.forest import fixed_feature_sets, FeatureSet
from debris_spectra.spectra import SpectralSignature, SignatureLibrary, ABSORPTION_DIPS

TEN_M_WINDOWS = ((496.6, 18.0), (560.0, 18.0), (664.5, 13.0), (835.1, 10.0))


def build_library(pvc=0.42, pvc_cont=0.17, tilt=0.0, ldpe_peak=0.06):
    grid = np.arange(440.0, 2251.0, 5.0)
    dips = np.zeros_like(grid)
    for c, s, dep in ABSORPTION_DIPS:
        dips += dep * np.exp(-((grid - c) ** 2) / (2 * s * s))
    sand = (0.22 + 0.10 / (1 + np.exp(-(grid - 590.0) / 25.0))
            + 0.03 / (1 + np.exp(-(grid - 2000.0) / 120.0)))
    water = (0.018 + tilt / (1 + np.exp(-(grid - 1700.0) / 150.0))
             + 0.055 * np.exp(-(((grid - 468.0) / 26.0) ** 2)))
    sigs = {
        'water': SpectralSignature('water', 'water', grid, np.round(water, 6)),
        'sand': SpectralSignature('sand', 'sand', grid, np.round(sand, 6)),
    }
    bases = {'PET': 0.04, 'PA66': 0.06, 'LDPE': 0.08, 'PA6': 0.10, 'PP': 0.12, 'uNAPO': 0.15}
    for name, base in bases.items():
        curve = base * (1.0 - dips)
        if name == 'LDPE':
            curve = curve + ldpe_peak * np.exp(-(((grid - 835.1) / 10.0) ** 2))
        sigs[name] = SpectralSignature(name, 'polymer', grid, np.round(np.clip(curve, 0, 1), 6))
    # PVC: bright visible/NIR windows over a dimmer submerged-looking continuum
    curve = pvc_cont * (1.0 - dips)
    for center, sigma in TEN_M_WINDOWS:
        curve = curve + (pvc - pvc_cont) * np.exp(-(((grid - center) / sigma) ** 2))
    sigs['PVC'] = SpectralSignature('PVC', 'polymer', grid, np.round(np.clip(curve, 0, 1), 6))
    return SignatureLibrary(sigs)


from debris_spectra.spectra import band_vector
lib = build_library()
for m in ('water', 'sand', 'PET', 'LDPE', 'PVC'):
    print(m.ljust(5), np.round(band_vector(lib[m]), 4), flush=True)

stacks = [ds.build_scene(s) for s in ds.default_campaign(lib, seed=0)]
d, _ = ds.clean(ds.add_indices(ds.campaign_dataset(stacks, 'bilinear')))
rep = ds.fit_forest(d, list(ds.FEATURE_NAMES), n_trees=100, seed=1234)
from debris_spectra import stats as st
corr = st.pearson_matrix(d, list(ds.FEATURE_NAMES))
per_class = [st.pearson_matrix(d, list(ds.FEATURE_NAMES), class_filter=c)
             for c in sorted(set(d.labels.tolist()))]
top2 = rep.top_features(2)
elig = [f for f in ds.FEATURE_NAMES if f not in top2 and max(abs(corr.r(f, t)) for t in top2) < 0.75]
print(f'forest train={rep.train_accuracy} test={rep.test_accuracy} top2={top2}', flush=True)
print('eligible:', elig, flush=True)
sets = ds.build_feature_sets(rep, corr, per_class)
D = [s for s in sets if s.id == 'D'][0]
print('D =', D.features, '| note:', D.note, flush=True)

for kseed in (0, 7, 29, 53):
    allok, lines = True, []
    for fset in sets:
        X = d.feature_matrix(fset.features)
        for k in (3, 4, 5):
            m = ds.kmeans_fit(X, k, seed=kseed, feature_set=fset.id)
            fl = ds.trend_checks([ds.compose_report(m, d, fset)], d)
            bad = (fl.two_cluster_share < 0.90 or fl.low_coverage_absorbed < 0.8
                   or not fl.water_sand_never_merged
                   or fl.polymer_affinity.get('PET') != 'water'
                   or fl.polymer_affinity.get('PVC') != 'sand')
            if bad:
                allok = False
                lines.append(f'  {fset.id} k={k} share={fl.two_cluster_share:.3f} '
                             f'low={fl.low_coverage_absorbed:.3f} merged={fl.water_sand_never_merged} '
                             f'PET={fl.polymer_affinity.get("PET")} PVC={fl.polymer_affinity.get("PVC")}')
    print(f'seed={kseed} ALL OK: {allok}', flush=True)
    for line in lines:
        print(line, flush=True)
