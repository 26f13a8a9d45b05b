#include "ebamr/bc.hpp"

namespace ebamr {

void fill_physical_bc(ConsField& U, const Box& dom, const DomainBc& bc) {
  const Box& box = U.box();
  for (int d = 0; d < 2; ++d) {
    const int t = 1 - d;
    const int lo = dom.lo[d], hi = dom.hi[d], len = dom.length(d);
    const int tlo = d == 0 ? std::max(dom.lo[t], box.lo[t]) : box.lo[t];
    const int thi = d == 0 ? std::min(dom.hi[t], box.hi[t]) : box.hi[t];
    for (int s = tlo; s <= thi; ++s) {
      for (int n = box.lo[d]; n <= box.hi[d]; ++n) {
        if (n >= lo && n <= hi) continue;
        const BcType b = n < lo ? bc.lo(d) : bc.hi(d);
        int m;
        if (b == BcType::periodic) m = n < lo ? n + len : n - len;
        else if (b == BcType::outflow) m = n < lo ? lo : hi;
        else m = n < lo ? 2 * lo - 1 - n : 2 * hi + 1 - n;
        const IntVect dst = d == 0 ? IntVect{n, s} : IntVect{s, n};
        const IntVect src = d == 0 ? IntVect{m, s} : IntVect{s, m};
        if (!box.contains(src)) continue;
        State v = U(src);
        if (b == BcType::wall) v[1 + d] = -v[1 + d];
        U(dst) = v;
      }
    }
  }
}

}  // namespace ebamr
