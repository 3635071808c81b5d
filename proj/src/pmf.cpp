#include "gwt/pmf.hpp"

#include <json.hpp>
#include <sstream>

#include "gwt/compensated.hpp"

namespace gwt {

double PMFVector::total_mass() const { return compensated_total(values); }

std::string PMFVector::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "index,probability\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        os << offset + static_cast<std::int64_t>(i) << ',' << values[i] << '\n';
    return os.str();
}

std::string PMFVector::to_json() const {
    nlohmann::json j{{"offset", offset}, {"values", values}, {"deficit", deficit()}};
    return j.dump();
}

}  // namespace gwt
