#!/usr/bin/env python3
"""Renders golden prompt files for the C++ prompt tests.

Templates below are an independent transcription; rendering is a single
left-to-right pass over {name} tokens. Run with --check to compare against
the committed files instead of writing them.
"""
import argparse
import json
import pathlib
import re
import sys

TEMPLATES = {
    'dense_caption.system': (
        'You will play two roles: a human asking questions related to describing a video and an intelligent chatbot designed for video description and dense captioning. Your task is to generate a detailed and descriptive paragraph based on the provided fragmented information about a video.\n##TASK:\nUsers will provide fragmented descriptions of a video, and you will generate ONE conversation-like question and answer related to describing the video in detail.The question should ask to describe the video content in detail.The answer should be a paraphrased and well-structured paragraph based on the provided description, with a minimum of 150 words and a maximum of 300 words.When the provided information is short, aim for a 150-word description, and when the provided information is more detailed, aim for very long descriptions up to 300-word description.\n##INSTRUCTIONS:\nThe question must be like a human conversation and focused on describing the video in detail.The answer must be a paraphrased version of the provided information, very detailed and descriptive, and within the specified word count.Combine the information from different sections of the video into a single coherent summary, ignoring any repetitions.Compare the information across all fragments of video and remove or ignore any inconsistent information and do not say the summary comes from different fragments of the video.Give more emphasis on the actions, the objects, and the colors of the background and the objects.Give the sequence of actions happening in the video and the objects the person interacts with.'
    ),
    'dense_caption.user': (
        'The fragmented video description is: {mega_caption}. Please generate the response in the form of a Python dictionary string with keys "Q" for question and "A" for answer. Each corresponding value should be the question and answer text respectively. For example, your response should look like this: {"Q": "Your question here...", "A": "Your answer here..."}. Emphasize that the answer should focus on describing the video content following the given instructions.'
    ),
    'qa_summary.system': (
        'You play two roles: a human asking questions related to summarizing a video and an intelligent chatbot designed for video summarization and dense captioning. Your task is video summarization. As an AI assistant, assume that you have watched the video and generated the provided caption as the summary of the video. Your task is to play the role of a human who asks three questions related to summarizing the video and then play the role of an AI assistant that provides paraphrased answers based on the video content and the provided caption.\n##TASK:\nUsers will provide a caption of the video alongside dense caption describing detected objects in that scene, and you will generate a set of three conversation-like questions related to summarizing the video. The questions and answers can be very similar, but they should all focus on summarizing the video content. The answers should be paraphrased versions of the provided caption and the dense caption with the object detections. You have information about the video based on the provided caption and have summarized the events in it. You also have the dense caption with the object and scene details. Generate THREE different questions asking to summarize the video and provide detailed answers to each based on the caption and the dense caption.\n##INSTRUCTIONS:\nThe questions must be like a human conversation and focused on summarizing the video. The answers must be paraphrased versions of the provided caption and the dense caption, and they should be detailed and descriptive.\n------\nSAMPLE QUESTIONS:\n- Can you provide a summary of the video?\n- What are the main events in the video?\n- Could you briefly describe the video content?'
    ),
    'qa_summary.user': (
        'The video caption is: {caption}. The additional dense caption is: {mega_caption}. Generate three different questions on summarizing the video, and provide answers that are paraphrased versions of the given caption and the dense caption. Please attempt to form question and answer pairs based on the two sets of text. Please generate the response in the form of a Python list of dictionary string with keys "Q" for question and "A" for answer. Each corresponding value should be the question and answer text respectively. For example, your response should look like this: [{"Q": "Your first question here...", "A": "Your first answer here..."}, {"Q": "Your first question here...", "A": "Your first answer here..."}, {"Q": "Your first question here...", "A": "Your first answer here..."}]. Emphasize that the questions and answers can be very similar, but they should all focus on summarizing the video content.'
    ),
    'qa_detail.system': (
        'You play two roles: a human asking questions related to a video and an intelligent chatbot designed for video summarization and dense captioning. Your task is extracting diverse video information. As an AI assistant, assume that you have watched the video and generated the provided caption as the summary of the video. Your task is to play the role of a human who asks three questions related to summarizing the video and then play the role of an AI assistant that provides paraphrased answers based on the video content and the provided caption.\n##TASK:\nUsers will provide a caption of the video alongside dense caption describing detected objects,setting and details in that scene, and you will generate a set of three conversation-like questions related to the video. The questions and answers can be very similar, but they should all focus on the details of the video content. The answers should be paraphrased versions of the provided caption and the dense caption with the object and scene details. You have information about the video based on the provided caption and have summarized the actions in it. You also have the dense caption with the scene details. Generate THREE different questions asking the details of the video and provide detailed answers to each based on the caption and the dense caption and one question should be about what actions are happening which should come from captions of the video.\n##INSTRUCTIONS:\nThe questions must be like a human conversation and focused on finding the intricate and unique details of the video. The answers must be paraphrased versions of the provided caption and the dense caption, and they should be detailed and descriptive. \n------\nSAMPLE QUESTIONS:\n- What are the actions occuring sequentially in the video?\n- What are the colors of the outfits of the person in the video?\n- What are the objects in the scene?\n- What is the person doing?'
    ),
    'qa_detail.user': (
        'The video caption is: {caption}. The additional dense caption is: {mega_caption} Generate three different questions on the details of the video, and provide answers that are paraphrased versions of the given caption and the dense caption. Please attempt to form question and answer pairs based on the two sets of text. Please generate the response in the form of a Python list of dictionary string with keys "Q" for question and "A" for answer. Each corresponding value should be the question and answer text respectively. For example, your response should look like this: [{"Q": "Your first question here...", "A": "Your first answer here..."}, {"Q": "Your first question here...", "A": "Your first answer here..."}, {"Q": "Your first question here...", "A": "Your first answer here..."}]. Emphasize that the questions and answers can be very similar, but they should all focus on the various details of the video content and understanding what actions are happening. Include at least one question about the sequence of actions happening in the video.'
    ),
    'pose_description.user': (
        'I have the coordinates that track the position of human joints throughout a video. I want to obtain the motion of each of these joints over time, using only these human joint coordinates. Here are the joint coordinates across observations: {pose_str}. I want to know the general motion of these joints AND the amount of this motion (if the joint moved a lot, or only a small amount over the frames). Respond with a single sentence that INDEPENDENTLY describes the motion directions and amount for each joint over the entire video. Please start your reply for each joint with the name of the joint. What can you tell me about the motion and motion magnitudes of these joints? Describe the concrete direction of the motion of the joints, do not just say they move in many directions, but only describe how it moves and not its numerical coordinates. Do not forget to list the motion and amount of motion in two separate sentences. Begin each description with the name of the joint followed by a colon. Also include a sentence that captures the structure of the human body, such as the posture and position of the joints relative to one another'
    ),
    'relevant_objects.user': (
        'I have a video where the action "{action_label}" is being performed by a human. I have detected all of the objects in the scene of this video, the objects I found are: {found_objects}. I only want the objects that are relevant to the action "{action_label}". From the list of detected objects, return only the objects that are relevant to the action being performed. It is crucial that the objects you return are contained in the list of objects I have given you, DO NOT create new objects or modify the names of the existing objects. Order the objects by their relevance to the action. IT IS OKAY TO NOT RETURN ANY OBJECTS IF NONE ARE RELEVANT, In this case respond with the string "None". The relevant objects are (return the objects separated by a comma) (never explain your decision).'
    ),
    'caption_1': (
        'Give a detailed description of the actions happening and describe the image, include motions and the objects interacted by the person'
    ),
    'caption_2': (
        'Summarize the content of the image in details explaining all events happening'
    ),
}

MEGA_CAPTION = (
    "In frame 0: A person in a grey shirt stands next to a wooden table. | A kitchen with a table.\n"
    "In frame 20: The person lifts a green bottle to their mouth. | A person drinking from a bottle."
)
ACTIONS = "Actions in order: drink water, sit down"
CAPTION = "A person stands by a table, drinks water from a bottle and then sits down on a chair."
POSE_OBS = [
    [(104, 201), (106, 197), (87, 162), (134, 49), (112, 40)],
    [(82, 208), (87, 204), (66, 167), (122, 63), (91, 38)],
]
JOINTS = ["right knee", "left knee", "right hand", "left hand", "head"]
ACTION_LABEL = "Drinking"
FOUND = ["plant", "chair", "bottle", "table"]


def render(tmpl, values):
    return re.sub(r"\{([^{}]*)\}", lambda m: values.get(m.group(1), m.group(0)), tmpl)


def pose_str(observations):
    sentences = []
    for k, obs in enumerate(observations):
        parts = [f"the {name} is at ({u}, {v})" for name, (u, v) in zip(JOINTS, obs)]
        sentences.append(f"In observation {k}, " + " and ".join(parts) + ".")
    return " ".join(sentences)


def chat(system, user):
    return [{"role": "system", "content": system}, {"role": "user", "content": user}]


def goldens():
    t = TEMPLATES
    mega = MEGA_CAPTION + "\n" + ACTIONS
    ps = pose_str(POSE_OBS)
    out = {
        "inputs.json": {
            "mega_caption": mega,
            "caption": CAPTION,
            "pose_observations": POSE_OBS,
            "action_label": ACTION_LABEL,
            "found_objects": FOUND,
        },
        "dense_caption.json": chat(t["dense_caption.system"], render(t["dense_caption.user"], {"mega_caption": mega})),
        "qa_summary.json": chat(
            t["qa_summary.system"], render(t["qa_summary.user"], {"caption": CAPTION, "mega_caption": mega})
        ),
        "qa_detail.json": chat(
            t["qa_detail.system"], render(t["qa_detail.user"], {"caption": CAPTION, "mega_caption": mega})
        ),
        "caption_prompts.json": [t["caption_1"], t["caption_2"]],
        "pose_str.txt": ps,
        "pose_description.txt": render(t["pose_description.user"], {"pose_str": ps}),
        "relevant_objects.txt": render(
            t["relevant_objects.user"], {"action_label": ACTION_LABEL, "found_objects": ", ".join(FOUND)}
        ),
    }
    files = {}
    for name, value in out.items():
        if name.endswith(".json"):
            files[name] = json.dumps(value, indent=1, ensure_ascii=False) + "\n"
        else:
            files[name] = value
    return files


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("outdir", type=pathlib.Path)
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args()
    bad = 0
    for name, text in goldens().items():
        path = args.outdir / name
        if args.check:
            if not path.exists() or path.read_bytes() != text.encode("utf-8"):
                print(f"stale golden file: {path}")
                bad += 1
        else:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(text.encode("utf-8"))
    if args.check and not bad:
        print(f"{len(goldens())} golden files up to date")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
