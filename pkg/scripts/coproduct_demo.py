"""Build SIER ⊕ SIER, print its carriers and certificate, and check one cocone."""

from dframes.coproduct import certify, coproduct_universal_check, dframe_coproduct
from dframes.dframe import SIER, identity_hom
from dframes.textio import dumps


def main():
    spec = dframe_coproduct([SIER, SIER])
    print(dumps("sier_sq", spec.dframe))
    cert = certify(spec)
    print(f"sizes {cert.sizes}  certificate {'ok' if cert.ok else 'FAIL'}")
    # the codiagonal cocone: both legs are the identity of SIER
    lam = coproduct_universal_check(spec, SIER, [identity_hom(SIER), identity_hom(SIER)])
    print("mediating map on L+:", [SIER.plus.labels[x] for x in lam.plus.map])
    print("mediating map on L-:", [SIER.minus.labels[x] for x in lam.minus.map])


if __name__ == "__main__":
    main()
