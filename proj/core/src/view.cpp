#include "semint/view.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace semint {

AspectAxis AspectAxis::measurable(std::string id, double lower, double upper, double unit,
                                  bool spatial) {
    AspectAxis a;
    a.id = std::move(id);
    a.kind = AxisKind::kMeasurable;
    a.lower = lower;
    a.upper = upper;
    a.unit = unit;
    a.spatial = spatial;
    a.validate();
    return a;
}

AspectAxis AspectAxis::categorical(std::string id, std::vector<std::string> values) {
    AspectAxis a;
    a.id = std::move(id);
    a.kind = AxisKind::kCategorical;
    a.values = std::move(values);
    a.validate();
    return a;
}

int AspectAxis::bin_count() const {
    if (kind == AxisKind::kCategorical) return static_cast<int>(values.size());
    double q = (upper - lower) / unit;
    int n = static_cast<int>(std::ceil(q - 1e-9));
    return n < 1 ? 1 : n;
}

double AspectAxis::representative(int bin) const {
    if (bin < 1 || bin > bin_count()) {
        throw std::out_of_range("axis '" + id + "': bin " + std::to_string(bin) +
                                " outside 1.." + std::to_string(bin_count()));
    }
    if (kind == AxisKind::kCategorical) return static_cast<double>(bin);
    double top = lower + bin * unit;
    return top < upper ? top : upper;
}

int AspectAxis::value_index(const std::string& value) const {
    if (kind != AxisKind::kCategorical) {
        throw std::invalid_argument("axis '" + id + "' is not categorical");
    }
    auto it = std::find(values.begin(), values.end(), value);
    if (it == values.end()) {
        throw std::out_of_range("axis '" + id + "': unknown value '" + value + "'");
    }
    return static_cast<int>(it - values.begin()) + 1;
}

void AspectAxis::validate() const {
    if (id.empty()) throw std::invalid_argument("axis id must be nonempty");
    if (kind == AxisKind::kMeasurable) {
        if (!(unit > 0.0)) {
            throw std::invalid_argument("axis '" + id + "': unit must be positive");
        }
        if (!(lower < upper)) {
            throw std::invalid_argument("axis '" + id + "': lower must be below upper");
        }
        if (!values.empty()) {
            throw std::invalid_argument("axis '" + id + "': measurable axis carries no value list");
        }
    } else {
        if (values.empty()) {
            throw std::invalid_argument("axis '" + id + "': categorical axis needs values");
        }
        std::set<std::string> seen(values.begin(), values.end());
        if (seen.size() != values.size()) {
            throw std::invalid_argument("axis '" + id + "': duplicate categorical value");
        }
    }
}

const AspectAxis* View::find(const std::string& id) const {
    for (const auto& a : axes) {
        if (a.id == id) return &a;
    }
    return nullptr;
}

const AspectAxis& View::at(const std::string& id) const {
    const AspectAxis* a = find(id);
    if (!a) throw std::out_of_range("view has no axis '" + id + "'");
    return *a;
}

namespace {

bool same_axis(const AspectAxis& a, const AspectAxis& b) {
    if (a.id != b.id || a.kind != b.kind) return false;
    if (a.kind == AxisKind::kCategorical) return a.values == b.values;
    return a.lower == b.lower && a.upper == b.upper && a.unit == b.unit &&
           a.spatial == b.spatial;
}

}  // namespace

bool View::is_subview_of(const View& other) const {
    for (const auto& a : axes) {
        const AspectAxis* o = other.find(a.id);
        if (!o || !same_axis(a, *o)) return false;
    }
    return true;
}

void View::validate() const {
    if (axes.empty()) throw std::invalid_argument("view needs at least one axis");
    std::set<std::string> ids;
    for (const auto& a : axes) {
        a.validate();
        if (!ids.insert(a.id).second) {
            throw std::invalid_argument("duplicate axis id '" + a.id + "'");
        }
    }
}

int Description::at(const std::string& axis_id) const {
    auto it = bins.find(axis_id);
    if (it == bins.end()) {
        throw std::out_of_range("description has no bin for axis '" + axis_id + "'");
    }
    return it->second;
}

int discretize(double value, const AspectAxis& axis) {
    if (axis.kind != AxisKind::kMeasurable) {
        throw std::invalid_argument("axis '" + axis.id + "' is not measurable");
    }
    if (!(value > axis.lower) || !(value <= axis.upper)) {
        throw std::out_of_range("axis '" + axis.id + "': value " + std::to_string(value) +
                                " outside (" + std::to_string(axis.lower) + ", " +
                                std::to_string(axis.upper) + "]");
    }
    double q = (value - axis.lower) / axis.unit;
    int k = static_cast<int>(std::ceil(q - 1e-9));
    if (k < 1) k = 1;
    int n = axis.bin_count();
    if (k > n) k = n;
    return k;
}

Description project(const Description& d, const View& sub) {
    Description out;
    for (const auto& a : sub.axes) {
        auto it = d.bins.find(a.id);
        if (it == d.bins.end()) {
            throw std::out_of_range("projection target axis '" + a.id +
                                    "' absent from description");
        }
        out.bins[a.id] = it->second;
    }
    return out;
}

void validate_description(const Description& d, const View& v) {
    for (const auto& [id, bin] : d.bins) {
        const AspectAxis* a = v.find(id);
        if (!a) throw std::out_of_range("description axis '" + id + "' not in view");
        if (bin < 1 || bin > a->bin_count()) {
            throw std::out_of_range("description bin " + std::to_string(bin) +
                                    " outside axis '" + id + "' range");
        }
    }
}

}  // namespace semint
