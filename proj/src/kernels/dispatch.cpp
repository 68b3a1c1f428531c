#include <cstdlib>
#include <string>

#include "iavns/kernels.hpp"

namespace iavns::kernels {

namespace {

constexpr KernelTable kScalar{Isa::scalar, &scalar::residuals, &scalar::accumulate};
#if defined(IAVNS_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, &avx2::residuals, &avx2::accumulate};
#endif

bool force_scalar() {
    const char* env = std::getenv("IAVNS_FORCE_SCALAR");
    return env != nullptr && std::string(env) != "0" && std::string(env) != "";
}

}  // namespace

bool isa_available(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(IAVNS_HAVE_AVX2)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& kernels_for(Isa isa) {
#if defined(IAVNS_HAVE_AVX2)
    if (isa == Isa::avx2 && isa_available(Isa::avx2)) return kAvx2;
#endif
    (void)isa;
    return kScalar;
}

const KernelTable& active_kernels() {
    static const KernelTable& table =
        force_scalar() ? kScalar : kernels_for(isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar);
    return table;
}

std::string_view isa_name(Isa isa) {
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

}  // namespace iavns::kernels
