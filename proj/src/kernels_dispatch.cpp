#include "wirefilm/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace wf::kernels {

#if defined(__x86_64__) || defined(_M_X64)
const Ops& avx2_ops();
#endif
#if defined(__aarch64__)
const Ops& neon_ops();
#endif

namespace {

bool host_supports(Isa isa)
{
    switch (isa) {
        case Isa::scalar: return true;
#if defined(__x86_64__) || defined(_M_X64)
        case Isa::avx2: return __builtin_cpu_supports("avx2") != 0;
#else
        case Isa::avx2: return false;
#endif
#if defined(__aarch64__)
        case Isa::neon: return true;
#else
        case Isa::neon: return false;
#endif
    }
    return false;
}

Isa detect_default()
{
    if (const char* env = std::getenv("WIREFILM_KERNELS")) {
        const std::string s(env);
        if (s == "scalar") return Isa::scalar;
        if (s == "avx2" && host_supports(Isa::avx2)) return Isa::avx2;
        if (s == "neon" && host_supports(Isa::neon)) return Isa::neon;
    }
    if (host_supports(Isa::avx2)) return Isa::avx2;
    if (host_supports(Isa::neon)) return Isa::neon;
    return Isa::scalar;
}

const Ops& table_for(Isa isa)
{
    switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
        case Isa::avx2: return avx2_ops();
#endif
#if defined(__aarch64__)
        case Isa::neon: return neon_ops();
#endif
        default: return scalar_ops();
    }
}

std::atomic<Isa>& current()
{
    static std::atomic<Isa> isa{detect_default()};
    return isa;
}

}  // namespace

const Ops& ops() { return table_for(current().load(std::memory_order_relaxed)); }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

bool isa_supported(Isa isa) { return host_supports(isa); }

void set_isa(Isa isa)
{
    if (!host_supports(isa))
        throw std::runtime_error("kernel ISA not supported on this host: " + isa_name(isa));
    current().store(isa, std::memory_order_relaxed);
}

std::string isa_name(Isa isa)
{
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "?";
}

}  // namespace wf::kernels
