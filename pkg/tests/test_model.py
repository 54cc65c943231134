# pylint: skip-file
import numpy as np
import pytest

from polardp.error import InvalidArgument, MalformedDocument
from polardp.model import (PolarDpObject, CrcConfig, DecodeInput, DirtyPaperSystem, DpEncodeResult, EncoderMode,
                           ExperimentRecord, FbParams, FrozenSetMode, FrozenSetSpec, NestedProcessState, PolarCode,
                           PowerMode, ReliabilityProfile, SourceEncodeInput)


class TestModel:

    @pytest.fixture()
    def code(self):
        return PolarCode(8, [0, 1, 2, 4], [0, 1, 0, 0])

    def test_error_on_parsing_abstract_base_class(self):
        with pytest.raises(NotImplementedError):
            PolarDpObject.parse_from_json({})

    def test_error_on_serializing_abstract_base_class(self):
        with pytest.raises(NotImplementedError):
            PolarDpObject().serialize()

    def test_parse_dict_deserialization_failure(self):
        with pytest.raises(MalformedDocument):
            PolarCode.parse_from_json({"frozen_set": [0]})
        with pytest.raises(MalformedDocument):
            PolarCode.parse_from_json([1, 2])
        with pytest.raises(MalformedDocument):
            FrozenSetSpec.parse_from_json({"mode": "largest"})

    def test_polar_code(self, code):
        assert code.n == 3
        assert code.info_set.tolist() == [3, 5, 6, 7]
        assert code.rate == 0.5
        assert code.frozen_mask().tolist() == [True, True, True, False, True, False, False, False]
        assert code.frozen_vector().tolist() == [0, 1, 0, 0, 0, 0, 0, 0]
        assert code.with_frozen_values([1, 1, 1, 1]).frozen_vector()[[0, 1, 2, 4]].tolist() == [1, 1, 1, 1]

    def test_polar_code_equality(self, code):
        assert code == PolarCode.parse_from_json(code.serialize())
        assert code == code.serialize()
        assert code != PolarCode(8, [0, 1, 2, 4])
        assert code != "code"

    @pytest.mark.parametrize("N,frozen,values", [
        (6, [0], None),
        (8, [2, 1], None),
        (8, [8], None),
        (8, [0, 1], [1]),
        (8, [0], [2]),
    ])
    def test_polar_code_invalid(self, N, frozen, values):
        with pytest.raises(InvalidArgument):
            PolarCode(N, frozen, values)

    def test_profile(self):
        profile = ReliabilityProfile(4, [0.1, 0.2, 0.3, 0.4], [0.2, 0.2, 0.5, 0.9], provenance={"parameter": 0.11})
        body = profile.serialize()
        assert body["n"] == 2 and "mc_error_rate" not in body
        assert ReliabilityProfile.parse_from_json(body) == profile
        with_mc = ReliabilityProfile(4, profile.z_lower, profile.z_upper, [0.0, 0.1, 0.2, 0.5])
        assert with_mc != profile
        with pytest.raises(InvalidArgument):
            ReliabilityProfile(4, [0.3] * 4, [0.2] * 4)
        with pytest.raises(InvalidArgument):
            ReliabilityProfile(4, [0.1] * 4, [0.2] * 4, [1.5] * 4)

    def test_profile_with_bhattacharyya_estimate(self):
        profile = ReliabilityProfile(4, [0.1] * 4, [0.9] * 4, [0.0, 0.1, 0.2, 0.5], mc_bhattacharyya=[0.2, 0.3, 0.4, 0.8])
        body = profile.serialize()
        assert body["mc_bhattacharyya"] == [0.2, 0.3, 0.4, 0.8]
        assert ReliabilityProfile.parse_from_json(body) == profile
        assert profile.z_estimate.tolist() == [0.2, 0.3, 0.4, 0.8]
        assert ReliabilityProfile(4, [0.1] * 4, [0.9] * 4).z_estimate.tolist() == [0.9] * 4
        with pytest.raises(InvalidArgument) as err:
            ReliabilityProfile(4, [0.1] * 4, [0.2] * 4, mc_bhattacharyya=[0.5] * 3)
        assert err.value.field == "mc_bhattacharyya"

    def test_frozen_set_spec(self):
        spec = FrozenSetSpec("target_performance", target=0.2, role="source", list_size=4, trials=30, seed=2)
        assert spec == spec.serialize()
        assert FrozenSetSpec.parse_from_json({"mode": "size", "size": 3}).serialize() == {"mode": "size",
                                                                                           "role": "channel",
                                                                                           "size": 3}
        with pytest.raises(InvalidArgument):
            FrozenSetSpec(FrozenSetMode.THRESHOLD, size=3)
        with pytest.raises(InvalidArgument):
            FrozenSetSpec(FrozenSetMode.SIZE, threshold=0.1, size=3)
        with pytest.raises(InvalidArgument):
            FrozenSetSpec(FrozenSetMode.SIZE, size=-1)

    def test_crc_config(self):
        crc = CrcConfig(8, "0x07")
        assert crc == CrcConfig.default()
        assert crc == {"r": 8, "poly_hex": "0x07"}
        assert crc.serialize() == {"r": 8, "poly_hex": "0x07", "init_hex": "0x00"}
        assert CrcConfig(4, "0011").polynomial == 3
        assert CrcConfig(16, 0x1021, "0xffff").init == 0xFFFF
        assert hash(crc) == hash(CrcConfig(8, 7))
        for args in ((0, 1), (8, 0x107), (8, "x^8+1"), (4, "0x7", "0x1f")):
            with pytest.raises(InvalidArgument):
                CrcConfig(*args)

    def test_system(self, code):
        system = DirtyPaperSystem(PolarCode(8, [0, 1]), code, CrcConfig(1, 1), 0.1, 0.3,
                                  power_mode="per_codeword", retry_limit=2)
        assert system.power_mode is PowerMode.PER_CODEWORD
        assert system.message_slots.tolist() == [2, 4]
        assert system.message_capacity == 1
        assert system.design_rate == pytest.approx(2 / 8)
        assert DirtyPaperSystem.parse_from_json(system.serialize()) == system
        with pytest.raises(InvalidArgument):
            DirtyPaperSystem(PolarCode(4, [0]), code, None, 0.1, 0.3)

    def test_encode_result(self):
        result = DpEncodeResult([1, 0, 0, 1], [0, 0, 1, 1], [], 0.5, True, 2)
        again = DpEncodeResult.parse_from_json(result.serialize())
        assert again.x.tolist() == [1, 0, 0, 1] and again.phase2_payload.size == 0
        assert again.attempts == 2

    def test_process_state(self):
        state = NestedProcessState(0.3, 0.1, 4)
        assert NestedProcessState.parse_from_json(state.serialize()) == state
        with pytest.raises(InvalidArgument):
            NestedProcessState(1.2, 0.1)
        with pytest.raises(InvalidArgument):
            NestedProcessState(0.2, 0.1, 26)

    def test_fb_params(self):
        params = FbParams.parse_from_json({"N": 1024, "p": 0.11, "D": 0.3})
        assert (params.eps_p, params.eps_D) == (0.001, 0.5)
        with pytest.raises(InvalidArgument):
            FbParams(1024, 0.11, 0.3, eps_D=1.0)

    def test_record(self):
        record = ExperimentRecord(3, 12345, 0.2, 0.2, decode_success=False, bit_errors=2)
        assert record == record.serialize()
        assert ExperimentRecord.parse_from_json(record.serialize()) == record
        with pytest.raises(InvalidArgument):
            ExperimentRecord(0, 0, distortion=1.5)

    def test_decode_input(self, code):
        with pytest.raises(InvalidArgument):
            DecodeInput(np.zeros(4), code)
        with pytest.raises(InvalidArgument):
            DecodeInput(np.full(8, np.inf), code)
        with pytest.raises(InvalidArgument):
            DecodeInput(np.zeros(8), code, crc=CrcConfig.default())
        with pytest.raises(InvalidArgument):
            DecodeInput(np.zeros(8), code, crc=CrcConfig.default(), crc_slots=[3, 5])
        body = DecodeInput(np.ones(8), code, 2, CrcConfig(2, 3), [3, 5, 6]).serialize()
        assert DecodeInput.parse_from_json(body).crc_slots.tolist() == [3, 5, 6]

    def test_source_encode_input(self, code):
        with pytest.raises(InvalidArgument):
            SourceEncodeInput(np.zeros(8), code, 4, 0.5)
        with pytest.raises(InvalidArgument):
            SourceEncodeInput(np.zeros(8), code, 4, 0.2, EncoderMode.RANDOMIZED_SC)
        with pytest.raises(InvalidArgument):
            SourceEncodeInput(np.zeros(8), code, 4, 0.2, dither=0.1)
        encode_input = SourceEncodeInput(np.zeros(8), code, 4, 0.2, "randomized_sc", seed=3)
        assert SourceEncodeInput.parse_from_json(encode_input.serialize()).mode is EncoderMode.RANDOMIZED_SC
