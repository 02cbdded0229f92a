from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import Optional, List, Dict, Literal

# Raw input models
class DistTriangle(BaseModel):
    """Lower triangle of a square symmetric matrix, row-major: (2,1), (3,1), (3,2), (4,1), ...

    None marks a missing cell.
    """
    model_config = ConfigDict(frozen=True)

    nobj: int
    values: List[Optional[float]]

# Flat MDS data structure
class MDSData(BaseModel):
    model_config = ConfigDict(frozen=True)

    iind: List[int]
    jind: List[int]
    delta: List[float]
    blocks: List[int]
    weights: List[float]
    nobj: int
    ndat: int

# Engine arguments
class EngineConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    ndim: int = Field(2, ge=1)
    ties: Literal[1, 2, 3] = 1
    weighted: bool = False
    ordinal: bool = False
    itmax: int = Field(1000, gt=0)
    eps: float = Field(1e-10, gt=0)
    digits: int = Field(10, ge=0)
    width: int = Field(12, ge=0)
    verbose: bool = False

# Engine output
class MDSResult(BaseModel):
    delta: List[float]
    dhat: List[float]
    confdist: List[float]
    conf: List[List[float]]
    weightmat: List[float]
    stress: float
    ndim: int
    init: List[List[float]]
    niter: int
    nobj: int
    iind: List[int]
    jind: List[int]
    weighted: bool
    ordinal: bool
    ties: int

# Initial configuration output, plot-compatible with MDSResult
class InitResult(BaseModel):
    method: Literal["torgerson", "guttman", "fulldim", "random", "elegant"]
    quality: float
    quality_kind: Literal["sstress", "stress"]
    conf: List[List[float]]
    delta: List[float]
    dhat: List[float]
    confdist: List[float]
    weightmat: List[float]
    iind: List[int]
    jind: List[int]
    nobj: int
    ndim: int
    warnings: List[str] = []

# Plot arguments
class PlotSpec(BaseModel):
    kind: Literal["shepard", "configuration", "distdhat"]
    title: Optional[str] = None
    fitlines: bool = True
    colline: str = "RED"
    colpoint: str = "BLUE"
    dim1: int = Field(1, ge=1)
    dim2: int = Field(2, ge=1)
    labels: Optional[List[str]] = None
    cex: float = Field(1.0, gt=0)
    lwd: float = Field(2.0, gt=0)

    @model_validator(mode="after")
    def check_dims(self):
        if self.dim1 == self.dim2:
            raise ValueError(f"dim1 and dim2 must differ, both are {self.dim1}")
        return self

# Benchmark report
class BenchReport(BaseModel):
    repetitions: int
    niter: int
    stress: float
    min_seconds: float
    median_seconds: float
    max_seconds: float
    phases: Dict[str, float]
