#pragma once

namespace potlab {

class SmoothedMeasure;
class CurveMeasure;

}  // namespace potlab
