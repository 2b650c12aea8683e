#pragma once

#include <map>
#include <string>
#include <vector>

namespace semint {

enum class AxisKind { kMeasurable, kCategorical };

// One aspect of observation: either a measurable quantity cut into unit
// intervals, or an ordered list of categorical values.
struct AspectAxis {
    std::string id;
    AxisKind kind = AxisKind::kCategorical;

    // measurable axes
    double lower = 0.0;
    double upper = 0.0;
    double unit = 0.0;
    bool spatial = false;  // spatial axes are the ones a points grid inflates

    // categorical axes
    std::vector<std::string> values;

    static AspectAxis measurable(std::string id, double lower, double upper, double unit,
                                 bool spatial = false);
    static AspectAxis categorical(std::string id, std::vector<std::string> values);

    int bin_count() const;
    // Upper endpoint of the bin's interval (categorical: the value itself).
    double representative(int bin) const;
    int value_index(const std::string& value) const;  // 1-based, throws if absent

    void validate() const;
};

// Ordered list of axes with unique ids.
struct View {
    std::vector<AspectAxis> axes;

    const AspectAxis* find(const std::string& id) const;
    const AspectAxis& at(const std::string& id) const;
    bool is_subview_of(const View& other) const;
    void validate() const;
};

// Assignment of one bin per axis; bins are 1-based. Categorical bins index
// into the axis value list.
struct Description {
    std::map<std::string, int> bins;

    int at(const std::string& axis_id) const;
    bool operator==(const Description& other) const = default;
};

// Maps a measurable value to its 1-based bin. Bins are the half-open
// intervals (lower + (k-1)*unit, lower + k*unit]; a value equal to the axis
// lower bound has no bin and is a range error.
int discretize(double value, const AspectAxis& axis);

// Restriction of d to the axes of sub. Every axis of sub must be present.
Description project(const Description& d, const View& sub);

// Checks every bin of d against the axes of v.
void validate_description(const Description& d, const View& v);

}  // namespace semint
