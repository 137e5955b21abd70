#include "netsync/metrics/collector.hpp"

#include <cstdio>

namespace netsync::metrics {

std::string Collector::to_csv() const {
  std::string out = "time_us,kind,client_id,id,gen_time_us,value,value2\n";
  char buf[256];
  for (const EventRow& r : rows_) {
    std::snprintf(buf, sizeof(buf), "%lld,%s,%u,%llu,%lld,%.17g,%.17g\n",
                  static_cast<long long>(r.time_us), r.kind.c_str(),
                  r.client_id, static_cast<unsigned long long>(r.id),
                  static_cast<long long>(r.gen_time_us), r.value, r.value2);
    out += buf;
  }
  return out;
}

}  // namespace netsync::metrics
